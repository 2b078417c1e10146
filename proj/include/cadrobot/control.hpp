#pragma once

#include <array>

namespace cadrobot::control {

// ============================================================================
// Discrete PI
// ============================================================================

struct PiGains {
    double kp = 0.02;    // mm / N
    double ki = 0.5;     // mm / (N s)
    double u_max = 10.0;  // |output| clamp, mm
};

struct PiState {
    double integrator = 0.0;  // mm
    double output = 0.0;      // mm
};

/// u = Kp·e + Ki·∫e dt with rectangular integration.  The integrator and the
/// output are both clamped to ±u_max (anti-windup).
double pi_step(PiState& state, const PiGains& gains, double error, double dt);

// ============================================================================
// Incremental fuzzy PI
// ============================================================================

/// Linguistic sets NB, NS, ZE, PS, PB: symmetric triangles on [-1, 1] with
/// centers -1, -0.5, 0, 0.5, 1.
inline constexpr std::array<double, 5> kFuzzyCenters{-1.0, -0.5, 0.0, 0.5, 1.0};

/// Membership of `x` (clamped to [-1, 1]) in set `index` (0 = NB .. 4 = PB).
double membership(int index, double x);

/// Anti-diagonal rule table: output set index for (error set, rate set).
int fuzzy_rule(int error_set, int rate_set);

/// Normalized increment in [-1, 1]: min inference over the 5x5 rule table,
/// centroid of the fired output centers.
double fuzzy_increment(double scaled_error, double scaled_rate);

struct FuzzyScaling {
    double error = 0.05;        // 1/N
    double error_rate = 0.0025;  // s/N
    double output = 0.1;        // mm per tick at full output
    double u_max = 10.0;        // mm
};

struct FuzzyState {
    double output = 0.0;  // accumulated displacement, mm
    double last_error = 0.0;
    bool primed = false;  // false until the first error has been seen
    double last_increment = 0.0;
};

/// u += output_scale · Δu, Δu from the scaled error and error rate; the rate is
/// zero on the first step.  Output clamped to ±u_max.
double fuzzy_pi_step(FuzzyState& state, const FuzzyScaling& scaling, double error, double dt);

}  // namespace cadrobot::control
