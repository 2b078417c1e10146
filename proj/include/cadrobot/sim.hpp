#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cadrobot/control.hpp"
#include "cadrobot/geometry.hpp"
#include "cadrobot/program.hpp"
#include "cadrobot/trajectory.hpp"

namespace cadrobot::sim {

using geometry::Transform;

// ============================================================================
// Program loading
// ============================================================================

/// Parse program text produced by program::emit.  Throws program::ProgramError
/// carrying the 1-based line number of the first offending statement.
program::RobotProgram load_program(std::string_view text);

// ============================================================================
// Environment and configuration
// ============================================================================

/// The "real" cell: how the true workpiece deviates from the programmed one.
struct Environment {
    /// Rigid displacement of the true workpiece, in the program frame.
    Transform offset;
    /// Standard deviation of per-tick surface height noise, mm (force scenario).
    double roughness = 0.0;
    std::uint64_t seed = 0;
    /// Contact stiffness k, N/mm (force scenario).
    double stiffness = 10.0;

    void validate() const;
};

struct SeamConfig {
    double rate = 5.0;          // Hz
    double resolution = 0.01;   // mm
    double gain_y = 1.0;
    double gain_z = 1.0;
    double max_step = 0.5;      // mm per tick, applied before quantization
    double sensing_range = 50.0;  // mm
    /// Simulated time; defaults to the program's motion time.
    std::optional<double> duration;

    void validate() const;
};

enum class ControllerKind { pi, fuzzy_pi };

std::string_view to_string(ControllerKind kind);

struct ForceConfig {
    double rate = 20.0;      // Hz
    double setpoint = 20.0;  // N
    ControllerKind controller = ControllerKind::pi;
    control::PiGains pi;
    control::FuzzyScaling fuzzy;
    /// Continuous zero-force time tolerated before the run is aborted, s.
    double contact_timeout = 1.0;
    std::optional<double> duration;

    void validate() const;
};

// ============================================================================
// Traces
// ============================================================================

enum class Scenario { seam, force };
enum class Status { ok, aborted };

struct TraceRow {
    double t = 0.0;  // s
    Vec3 nominal;    // programmed tool position, program frame
    // seam
    double err_y = 0.0, err_z = 0.0;    // sensed deviation, path frame
    double corr_y = 0.0, corr_z = 0.0;  // accumulated correction after this tick
    // force
    double force = 0.0;
    double setpoint = 0.0;
    double displacement = 0.0;  // along the inward surface normal, after this tick
    /// Controller internals: seam = correction steps (y); PI = integrator;
    /// fuzzy = last normalized increment.
    double controller_state = 0.0;
    Status status = Status::ok;
};

struct SimTrace {
    Scenario scenario = Scenario::seam;
    double rate = 0.0;
    std::vector<TraceRow> rows;
    bool aborted = false;
    std::string abort_reason;
};

/// CSV with the scenario's header; numbers fixed to 4 decimals.
std::string to_csv(const SimTrace& trace);

// ============================================================================
// Seam tracking
// ============================================================================

struct SeamReading {
    double e_y = 0.0;
    double e_z = 0.0;
    double distance = 0.0;
};

/// Offset from `tool` to the closest point of `true_seam`, expressed in the
/// path frame for travel direction `travel`.  nullopt ("seam lost") when that
/// point lies farther than `range`.
std::optional<SeamReading> seam_sensor(const std::vector<Vec3>& true_seam, const Vec3& tool, const Vec3& travel,
                                       double range = 50.0);

/// Replay `program` with a proportional, clamped, quantized Y/Z correction loop.
SimTrace run_seam(const program::RobotProgram& program, const Environment& env, const SeamConfig& cfg);

// ============================================================================
// Force control
// ============================================================================

/// Unilateral spring.  `excess` is penetration beyond the preload depth
/// setpoint/k at which the programmed path sits; F = max(0, setpoint + k·excess).
double contact_force(double setpoint, double stiffness, double excess);

/// Replay `program` against the offset, rough surface, holding contact force.
SimTrace run_force(const program::RobotProgram& program, const Environment& env, const ForceConfig& cfg);

/// Largest |F − setpoint| over rows with t >= `after` (s); falls back to the
/// second half of the trace if it is shorter than that.
double steady_state_force_error(const SimTrace& trace, double after = 5.0);

}  // namespace cadrobot::sim
