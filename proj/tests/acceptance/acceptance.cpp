// Acceptance checks.  Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "../oracles/homogeneous.hpp"
#include "../oracles/seam_loop.hpp"
#include "../oracles/subdivision.hpp"
#include "../scene_gen.hpp"
#include "../support.hpp"
#include "cadrobot/cli.hpp"
#include "cadrobot/control.hpp"
#include "cadrobot/planner.hpp"
#include "cadrobot/program.hpp"
#include "cadrobot/sim.hpp"

using namespace cadrobot;
using geometry::Quaternion;
using geometry::Transform;
using geometry::Vec3;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

class Clock {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

// --- 1 ----------------------------------------------------------------------

Outcome transform_algebra() {
    const Clock clock;
    testing::Random r(1001);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Transform a = r.transform(), b = r.transform(), c = r.transform();
        const Vec3 p = r.point();
        const auto ma = oracle::to_mat4(a);
        worst = std::max(worst, testing::max_diff(geometry::compose(a, geometry::invert(a)), Transform::identity()));
        worst = std::max(worst, testing::max_diff(geometry::compose(geometry::compose(a, b), c),
                                                  geometry::compose(a, geometry::compose(b, c))));
        worst = std::max(worst, geometry::norm(geometry::apply(geometry::compose(a, b), p) -
                                               geometry::apply(a, geometry::apply(b, p))));
        worst = std::max(worst, geometry::norm(geometry::apply(geometry::invert(a), geometry::apply(a, p)) - p));
        worst = std::max(worst, oracle::max_abs_diff(oracle::to_mat4(geometry::compose(a, b)),
                                                     oracle::multiply(ma, oracle::to_mat4(b))));
        worst = std::max(worst, oracle::max_abs_diff(oracle::to_mat4(geometry::invert(a)), oracle::inverse(ma)));
        const auto op = oracle::apply(ma, {p.x, p.y, p.z});
        worst = std::max(worst, geometry::norm(geometry::apply(a, p) - Vec3{op[0], op[1], op[2]}));
    }
    const double t = clock.seconds();
    return {worst <= 1e-9 && t < 1.0, "max error " + fmt("%.3g", worst) + ", " + fmt("%.3f", t) + " s"};
}

// --- 2 ----------------------------------------------------------------------

Outcome rebase_round_trip() {
    testing::Random r(1002);
    double worst = 0.0;
    std::size_t points = 0;
    for (int i = 0; i < 100; ++i) {
        const scene::Scene s = testing::random_scene(r);
        const scene::Scene b = planner::rebase(s, "B");
        const Transform u_b = *s.find_frame("B");
        for (std::size_t pi = 0; pi < s.paths.size(); ++pi) {
            for (std::size_t si = 0; si < s.paths[pi].segments.size(); ++si) {
                const auto& orig = s.paths[pi].segments[si].points;
                const auto& moved = b.paths[pi].segments[si].points;
                for (std::size_t k = 0; k < orig.size(); ++k, ++points) {
                    worst = std::max(worst, geometry::norm(geometry::apply(u_b, moved[k]) - orig[k]));
                }
            }
        }
    }
    return {worst <= 1e-9, std::to_string(points) + " points, max error " + fmt("%.3g", worst)};
}

// --- 3 ----------------------------------------------------------------------

Outcome interpolation() {
    testing::Random r(1003);
    double spacing_err = 0.0, collinear_err = 0.0, endpoint_err = 0.0, angle_err = 0.0;
    bool counts_ok = true;
    scene::Scene base;
    base.frames.push_back({"B", {}});
    base.frames.push_back({"C", {}});
    for (int i = 0; i < 500; ++i) {
        const Vec3 a = r.point(200.0);
        const Vec3 b = a + r.point(80.0);
        const double v = r.uniform(1.0, 100.0), dt = r.uniform(0.01, 0.5);
        scene::Scene s = base;
        s.frames[1].transform = {r.rotation(), {0, 0, 0}};
        s.paths.push_back({"p", {{scene::SegmentKind::line, {a, b}, "C", true, v}}});
        const planner::PlannedPath out = planner::interpolate_risk(planner::assign_orientations(s).front(), v, dt);
        const std::size_t n = oracle::brute_intervals(geometry::distance(a, b), v, dt);
        counts_ok = counts_ok && out.poses.size() == n + 1;
        const double step = geometry::distance(a, b) / static_cast<double>(n);
        for (std::size_t k = 1; k < out.poses.size(); ++k) {
            const Vec3 p = out.poses[k].position;
            spacing_err = std::max(spacing_err, std::abs(geometry::distance(out.poses[k - 1].position, p) - step));
            collinear_err = std::max(collinear_err, geometry::norm(geometry::cross(p - a, b - a)) / geometry::norm(b - a));
        }
        endpoint_err = std::max({endpoint_err, geometry::norm(out.poses.front().position - a),
                                 geometry::norm(out.poses.back().position - b)});

        const Quaternion q0 = r.quaternion(), q1 = r.quaternion();
        const double theta = geometry::arc_angle(q0, q1);
        for (int k = 0; k <= 10; ++k) {
            const double t = k / 10.0;
            angle_err = std::max(angle_err, std::abs(geometry::arc_angle(q0, geometry::slerp(q0, q1, t)) - t * theta));
        }
    }
    const Quaternion rz90 = geometry::rotation_to_quaternion(geometry::RotationMatrix::about_z(geometry::deg_to_rad(90)));
    const Quaternion mid = geometry::slerp(Quaternion{}, rz90, 0.5);
    const double mid_err = std::max({std::abs(mid.w() - 0.92388), std::abs(mid.x()), std::abs(mid.y()),
                                     std::abs(mid.z() - 0.38268)});
    const bool pass = counts_ok && spacing_err <= 1e-6 && collinear_err <= 1e-6 && endpoint_err == 0.0 &&
                      angle_err <= 1e-7 && mid_err <= 1e-5;
    std::ostringstream os;
    os << "spacing " << fmt("%.3g", spacing_err) << ", collinearity " << fmt("%.3g", collinear_err) << ", endpoints "
       << fmt("%.3g", endpoint_err) << ", slerp angle " << fmt("%.3g", angle_err) << " rad, midpoint "
       << fmt("%.3g", mid_err) << (counts_ok ? "" : ", interval count mismatch");
    return {pass, os.str()};
}

// --- 4 ----------------------------------------------------------------------

// Half a unit in the fourth decimal, plus the half-ulp a parsed decimal may sit
// away from its printed value.
constexpr double kFormatTolerance = 5e-5 + 1e-12;

std::string scratch_dir() {
    static const std::string dir = [] {
        auto d = std::filesystem::temp_directory_path() / ("cadrobot-acceptance-" + std::to_string(::getpid()));
        std::filesystem::create_directories(d);
        return d.string();
    }();
    return dir;
}

int cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

double round_trip_error(const program::RobotProgram& p) {
    const program::RobotProgram q = sim::load_program(program::emit(p));
    if (q.targets.size() != p.targets.size() || q.instructions.size() != p.instructions.size()) return INFINITY;
    double worst = 0.0;
    for (std::size_t i = 0; i < p.targets.size(); ++i) {
        for (int a = 0; a < 3; ++a) worst = std::max(worst, std::abs(q.targets[i].position[a] - p.targets[i].position[a]));
        for (std::size_t c = 0; c < 4; ++c) worst = std::max(worst, std::abs(q.targets[i].quaternion[c] - p.targets[i].quaternion[c]));
        if (q.targets[i].name != p.targets[i].name) return INFINITY;
    }
    for (std::size_t i = 0; i < p.instructions.size(); ++i) {
        if (q.instructions[i].opcode != p.instructions[i].opcode || q.instructions[i].targets != p.instructions[i].targets) {
            return INFINITY;
        }
        worst = std::max(worst, std::abs(q.instructions[i].speed - p.instructions[i].speed));
    }
    return worst;
}

Outcome codegen_golden() {
    bool identical = true;
    double worst = 0.0;
    for (const std::string name : {"butt_joint", "profile"}) {
        const std::string out = scratch_dir() + "/" + name + ".prog";
        if (cli({"compile", "--scene", testing::fixture(name + ".scene.json"), "--base", "B", "--out", out}) != 0) {
            return {false, "compile of " + name + " failed"};
        }
        identical = identical && testing::slurp(out) == testing::slurp(testing::fixture(name + ".golden.prog"));
        const scene::Scene s = scene::parse_scene(testing::slurp(testing::fixture(name + ".scene.json")));
        auto planned = planner::assign_orientations(planner::rebase(s, "B"));
        for (auto& p : planned) p = planner::interpolate_risk(p, 0.1);
        worst = std::max(worst, round_trip_error(program::lower(planned.front())));
    }
    testing::Random r(1004);
    for (int i = 0; i < 500; ++i) {
        program::RobotProgram p;
        p.name = "rnd";
        for (int k = 0; k < 6; ++k) {
            p.targets.push_back({"t" + std::to_string(k + 1), r.point(2000.0), r.quaternion().wxyz()});
            p.instructions.push_back({k == 0 ? program::Opcode::MOVEJ : program::Opcode::MOVEL, {p.targets.back().name},
                                      r.uniform(1, 200), 0});
        }
        worst = std::max(worst, round_trip_error(p));
    }
    return {identical && worst <= kFormatTolerance, std::string(identical ? "goldens identical" : "golden mismatch") +
                                            ", round trip max error " + fmt("%.3g", worst)};
}

// --- 5 ----------------------------------------------------------------------

bool on_grid(double v, double res) { return std::abs(v / res - std::round(v / res)) <= 1e-9; }

Outcome seam_loop() {
    const Clock clock;
    const program::RobotProgram prog = sim::load_program(testing::slurp(testing::fixture("seam_line.prog")));
    sim::Environment env;
    env.offset = Transform(geometry::RotationMatrix::identity(), {0, 1.0, 0});
    sim::SeamConfig cfg;  // 5 Hz, 0.01 mm
    cfg.gain_y = cfg.gain_z = 1.0;
    const sim::SimTrace trace = sim::run_seam(prog, env, cfg);
    const auto expect = oracle::seam_loop({.length = 100, .speed = 10, .rate = 5, .resolution = 0.01, .gain = 1.0, .dy = 1.0});
    const double t = clock.seconds();

    bool grid = true, oracle_match = trace.rows.size() == expect.size(), converged = true;
    for (std::size_t k = 0; k < trace.rows.size(); ++k) {
        const auto& row = trace.rows[k];
        grid = grid && on_grid(row.corr_y, 0.01) && on_grid(row.corr_z, 0.01);
        if (row.t >= 2.0) converged = converged && std::abs(row.corr_y - 1.0) <= 0.01;
        if (k < expect.size()) {
            oracle_match = oracle_match && std::abs(row.corr_y - expect[k].corr_y) <= 1e-12 &&
                           std::abs(row.corr_z - expect[k].corr_z) <= 1e-12 &&
                           std::abs(row.err_y - expect[k].err_y) <= 1e-12;
        }
    }
    const bool pass = !trace.aborted && grid && oracle_match && converged && t < 1.0;
    std::ostringstream os;
    os << "final " << fmt("%.4f", trace.rows.back().corr_y) << " mm, " << trace.rows.size() << " rows"
       << (grid ? "" : ", off-grid correction") << (oracle_match ? ", oracle match" : ", oracle mismatch")
       << (converged ? "" : ", not converged by 2 s") << ", " << fmt("%.3f", t) << " s";
    return {pass, os.str()};
}

// --- 6 ----------------------------------------------------------------------

Outcome force_loop() {
    const program::RobotProgram prog = sim::load_program(testing::slurp(testing::fixture("force_line.prog")));
    std::ostringstream os;
    bool pass = true;
    for (auto kind : {sim::ControllerKind::pi, sim::ControllerKind::fuzzy_pi}) {
        sim::Environment env;
        env.offset = Transform(geometry::RotationMatrix::identity(), {0, 0, -1.0});
        env.stiffness = 10.0;
        sim::ForceConfig cfg;  // 20 Hz, 20 N, default gains
        cfg.controller = kind;
        const sim::SimTrace calm = sim::run_force(prog, env, cfg);
        const double err = sim::steady_state_force_error(calm, 5.0);

        env.roughness = 0.05;
        env.seed = 99;
        const sim::SimTrace rough = sim::run_force(prog, env, cfg);
        double mean = 0.0;
        for (const auto& r : rough.rows) mean += r.force;
        mean /= static_cast<double>(rough.rows.size());
        double var = 0.0;
        for (const auto& r : rough.rows) var += (r.force - mean) * (r.force - mean);
        var /= static_cast<double>(rough.rows.size() - 1);

        pass = pass && !calm.aborted && !rough.aborted && err <= 0.5 && var > 0.0;
        os << sim::to_string(kind) << ": steady error " << fmt("%.4f", err) << " N, rough variance "
           << fmt("%.4f", var) << " N^2; ";
    }
    bool odd = true;
    for (int i = -10; i <= 10; ++i) {
        for (int j = -10; j <= 10; ++j) {
            const double e = i / 10.0, de = j / 10.0;
            odd = odd && control::fuzzy_increment(-e, -de) == -control::fuzzy_increment(e, de);
        }
    }
    os << (odd ? "odd symmetry exact" : "odd symmetry broken");
    return {pass && odd, os.str()};
}

// --- 7 ----------------------------------------------------------------------

Outcome null_test() {
    const program::RobotProgram seam_prog = sim::load_program(testing::slurp(testing::fixture("seam_line.prog")));
    const program::RobotProgram force_prog = sim::load_program(testing::slurp(testing::fixture("force_line.prog")));
    sim::SeamConfig scfg;
    scfg.gain_y = scfg.gain_z = 1.0;
    bool zero = true;
    std::size_t rows = 0;
    const sim::SimTrace seam = sim::run_seam(seam_prog, {}, scfg);
    for (const auto& r : seam.rows) zero = zero && r.corr_y == 0.0 && r.corr_z == 0.0, ++rows;
    for (auto kind : {sim::ControllerKind::pi, sim::ControllerKind::fuzzy_pi}) {
        sim::ForceConfig fcfg;
        fcfg.controller = kind;
        const sim::SimTrace force = sim::run_force(force_prog, {}, fcfg);
        for (const auto& r : force.rows) zero = zero && r.displacement == 0.0 && r.force == fcfg.setpoint, ++rows;
        zero = zero && !force.aborted;
    }
    return {zero && !seam.aborted, std::to_string(rows) + " rows, " + (zero ? "all corrections zero" : "nonzero correction")};
}

// --- 8 ----------------------------------------------------------------------

Outcome determinism() {
    const std::string d = scratch_dir();
    const std::vector<std::vector<std::string>> runs{
        {"compile", "--scene", testing::fixture("butt_joint.scene.json"), "--base", "B", "--out", d + "/det.prog"},
        {"compile", "--scene", testing::fixture("profile.scene.json"), "--base", "B", "--interp-dt", "0.05", "--out",
         d + "/det2.prog"},
        {"simulate", "--program", testing::fixture("seam_line.prog"), "--offset-y", "0.8", "--offset-z", "-0.3",
         "--rot-z-deg", "0.4", "--out", d + "/det_seam.csv"},
        {"simulate", "--program", testing::fixture("force_line.prog"), "--scenario", "force", "--roughness", "0.05",
         "--seed", "1234", "--out", d + "/det_force.csv"},
        {"simulate", "--program", testing::fixture("force_line.prog"), "--scenario", "force", "--controller", "fuzzy",
         "--roughness", "0.05", "--seed", "1234", "--out", d + "/det_fuzzy.csv"}};
    int identical = 0;
    for (const auto& args : runs) {
        const std::string out = args.back();
        const int c1 = cli(args);
        const std::string a = testing::slurp(out), am = testing::slurp(out + ".manifest.json");
        const int c2 = cli(args);
        if (c1 == 0 && c2 == 0 && !a.empty() && a == testing::slurp(out) && am == testing::slurp(out + ".manifest.json")) {
            ++identical;
        }
    }
    return {identical == static_cast<int>(runs.size()),
            std::to_string(identical) + "/" + std::to_string(runs.size()) + " invocations byte-identical"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"transform algebra, 1000 random frames", transform_algebra},
        {"rebase round trip, 100 random scenes", rebase_round_trip},
        {"risk interpolation and slerp", interpolation},
        {"codegen golden files and round trip", codegen_golden},
        {"seam loop at 5 Hz / 0.01 mm / 10 mm/s", seam_loop},
        {"force loop at 20 Hz, PI and fuzzy PI", force_loop},
        {"zero-perturbation null test", null_test},
        {"CLI determinism", determinism}};
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << ": " << criteria[i].first << " ("
                  << o.detail << ")\n";
    }
    std::filesystem::remove_all(scratch_dir());
    return failures == 0 ? 0 : 1;
}
