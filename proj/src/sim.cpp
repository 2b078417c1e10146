#include "cadrobot/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cadrobot/error.hpp"

namespace cadrobot::sim {

using program::format_fixed;

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ValidationError(what);
}

bool positive(double v) { return v > 0.0 && std::isfinite(v); }
bool non_negative(double v) { return v >= 0.0 && std::isfinite(v); }

std::size_t tick_count(double duration, double rate) {
    // Inclusive of t = 0; the tolerance keeps t = duration when it lands on a tick.
    return static_cast<std::size_t>(std::floor(duration * rate + 1e-9)) + 1;
}

}  // namespace

void Environment::validate() const {
    require(non_negative(roughness), "roughness must be >= 0");
    require(positive(stiffness), "stiffness must be > 0");
}

void SeamConfig::validate() const {
    require(positive(rate), "seam rate must be > 0");
    require(positive(resolution), "seam resolution must be > 0");
    require(non_negative(gain_y) && non_negative(gain_z), "seam gains must be >= 0");
    require(positive(max_step), "max correction per tick must be > 0");
    require(positive(sensing_range), "sensing range must be > 0");
    require(!duration || positive(*duration), "duration must be > 0");
}

void ForceConfig::validate() const {
    require(positive(rate), "force rate must be > 0");
    require(positive(setpoint), "force setpoint must be > 0");
    require(non_negative(pi.kp) && non_negative(pi.ki), "PI gains must be >= 0");
    require(positive(pi.u_max) && positive(fuzzy.u_max), "output clamp must be > 0");
    require(non_negative(fuzzy.error) && non_negative(fuzzy.error_rate) && non_negative(fuzzy.output),
            "fuzzy scaling factors must be >= 0");
    require(positive(contact_timeout), "contact timeout must be > 0");
    require(!duration || positive(*duration), "duration must be > 0");
}

std::string_view to_string(ControllerKind kind) {
    return kind == ControllerKind::pi ? "pi" : "fuzzy";
}

// ============================================================================
// CSV
// ============================================================================

std::string to_csv(const SimTrace& trace) {
    std::ostringstream os;
    if (trace.scenario == Scenario::seam) {
        os << "t_s,x_mm,y_mm,z_mm,err_y_mm,err_z_mm,corr_y_mm,corr_z_mm,status\n";
    } else {
        os << "t_s,x_mm,y_mm,z_mm,force_N,setpoint_N,disp_mm,status\n";
    }
    for (const TraceRow& r : trace.rows) {
        os << format_fixed(r.t) << ',' << format_fixed(r.nominal.x) << ',' << format_fixed(r.nominal.y) << ','
           << format_fixed(r.nominal.z) << ',';
        if (trace.scenario == Scenario::seam) {
            os << format_fixed(r.err_y) << ',' << format_fixed(r.err_z) << ',' << format_fixed(r.corr_y) << ','
               << format_fixed(r.corr_z);
        } else {
            os << format_fixed(r.force) << ',' << format_fixed(r.setpoint) << ',' << format_fixed(r.displacement);
        }
        os << ',' << (r.status == Status::ok ? "OK" : "ABORTED") << '\n';
    }
    return os.str();
}

// ============================================================================
// Seam tracking
// ============================================================================

std::optional<SeamReading> seam_sensor(const std::vector<Vec3>& true_seam, const Vec3& tool, const Vec3& travel,
                                       double range) {
    if (true_seam.empty()) return std::nullopt;
    const ClosestPoint cp = closest_point(true_seam, tool);
    if (cp.distance > range) return std::nullopt;
    const PathFrame f = path_frame(travel);
    const Vec3 v = cp.point - tool;
    return SeamReading{geometry::dot(v, f.y), geometry::dot(v, f.z), cp.distance};
}

SimTrace run_seam(const program::RobotProgram& program, const Environment& env, const SeamConfig& cfg) {
    env.validate();
    cfg.validate();
    const Trajectory trajectory(program);

    std::vector<Vec3> truth = trajectory.polyline();
    for (Vec3& p : truth) p = geometry::apply(env.offset, p);

    SimTrace trace;
    trace.scenario = Scenario::seam;
    trace.rate = cfg.rate;

    const std::size_t ticks = tick_count(cfg.duration.value_or(trajectory.duration()), cfg.rate);
    // Corrections live as integer multiples of the resolution.
    long long steps_y = 0, steps_z = 0;
    for (std::size_t k = 0; k < ticks; ++k) {
        const double t = static_cast<double>(k) / cfg.rate;
        const TrajectorySample s = trajectory.at(t);
        const PathFrame f = path_frame(s.tangent);

        TraceRow row;
        row.t = t;
        row.nominal = s.position;
        const Vec3 tool = s.position + f.y * (static_cast<double>(steps_y) * cfg.resolution) +
                          f.z * (static_cast<double>(steps_z) * cfg.resolution);
        const std::optional<SeamReading> reading = seam_sensor(truth, tool, s.tangent, cfg.sensing_range);
        if (!reading) {
            row.corr_y = static_cast<double>(steps_y) * cfg.resolution;
            row.corr_z = static_cast<double>(steps_z) * cfg.resolution;
            row.controller_state = static_cast<double>(steps_y);
            row.status = Status::aborted;
            trace.rows.push_back(row);
            trace.aborted = true;
            std::ostringstream os;
            os << "seam lost at t = " << format_fixed(t) << " s";
            trace.abort_reason = os.str();
            break;
        }
        const double dy = std::clamp(cfg.gain_y * reading->e_y, -cfg.max_step, cfg.max_step);
        const double dz = std::clamp(cfg.gain_z * reading->e_z, -cfg.max_step, cfg.max_step);
        steps_y = std::llround(static_cast<double>(steps_y) + dy / cfg.resolution);
        steps_z = std::llround(static_cast<double>(steps_z) + dz / cfg.resolution);

        row.err_y = reading->e_y;
        row.err_z = reading->e_z;
        row.corr_y = static_cast<double>(steps_y) * cfg.resolution;
        row.corr_z = static_cast<double>(steps_z) * cfg.resolution;
        row.controller_state = static_cast<double>(steps_y);
        trace.rows.push_back(row);
    }
    return trace;
}

// ============================================================================
// Force control
// ============================================================================

double contact_force(double setpoint, double stiffness, double excess) {
    return std::max(0.0, setpoint + stiffness * excess);
}

SimTrace run_force(const program::RobotProgram& program, const Environment& env, const ForceConfig& cfg) {
    env.validate();
    cfg.validate();
    const Trajectory trajectory(program);

    SimTrace trace;
    trace.scenario = Scenario::force;
    trace.rate = cfg.rate;

    std::mt19937_64 rng(env.seed);
    std::normal_distribution<double> noise(0.0, 1.0);

    control::PiState pi;
    control::FuzzyState fuzzy;
    const double dt = 1.0 / cfg.rate;
    double displacement = 0.0;
    std::optional<double> contact_lost_since;

    const std::size_t ticks = tick_count(cfg.duration.value_or(trajectory.duration()), cfg.rate);
    for (std::size_t k = 0; k < ticks; ++k) {
        const double t = static_cast<double>(k) / cfg.rate;
        const TrajectorySample s = trajectory.at(t);
        const PathFrame f = path_frame(s.tangent);

        // Outward surface normal is the path-frame z axis; the tool presses along −z.
        const double surface_shift = geometry::dot(f.z, geometry::apply(env.offset, s.position) - s.position);
        const double rough = env.roughness > 0.0 ? env.roughness * noise(rng) : 0.0;
        const double force = contact_force(cfg.setpoint, env.stiffness, surface_shift + rough + displacement);

        TraceRow row;
        row.t = t;
        row.nominal = s.position;
        row.force = force;
        row.setpoint = cfg.setpoint;

        if (force <= 0.0) {
            if (!contact_lost_since) contact_lost_since = t;
        } else {
            contact_lost_since.reset();
        }
        if (contact_lost_since && t - *contact_lost_since > cfg.contact_timeout) {
            row.displacement = displacement;
            row.status = Status::aborted;
            trace.rows.push_back(row);
            trace.aborted = true;
            std::ostringstream os;
            os << "contact lost since t = " << format_fixed(*contact_lost_since) << " s";
            trace.abort_reason = os.str();
            break;
        }

        const double error = cfg.setpoint - force;
        if (cfg.controller == ControllerKind::pi) {
            displacement = control::pi_step(pi, cfg.pi, error, dt);
            row.controller_state = pi.integrator;
        } else {
            displacement = control::fuzzy_pi_step(fuzzy, cfg.fuzzy, error, dt);
            row.controller_state = fuzzy.last_increment;
        }
        row.displacement = displacement;
        trace.rows.push_back(row);
    }
    return trace;
}

double steady_state_force_error(const SimTrace& trace, double after) {
    if (trace.rows.empty()) return 0.0;
    double from = after;
    if (trace.rows.back().t < after) from = trace.rows.back().t / 2.0;
    double worst = 0.0;
    for (const TraceRow& r : trace.rows) {
        if (r.t >= from) worst = std::max(worst, std::abs(r.force - r.setpoint));
    }
    return worst;
}

}  // namespace cadrobot::sim
