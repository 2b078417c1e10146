#include "cadrobot/control.hpp"

#include <algorithm>
#include <cmath>

namespace cadrobot::control {

double pi_step(PiState& state, const PiGains& gains, double error, double dt) {
    state.integrator = std::clamp(state.integrator + gains.ki * error * dt, -gains.u_max, gains.u_max);
    state.output = std::clamp(gains.kp * error + state.integrator, -gains.u_max, gains.u_max);
    return state.output;
}

double membership(int index, double x) {
    const double c = kFuzzyCenters[static_cast<std::size_t>(index)];
    return std::max(0.0, 1.0 - std::abs(std::clamp(x, -1.0, 1.0) - c) / 0.5);
}

int fuzzy_rule(int error_set, int rate_set) { return std::clamp(error_set + rate_set - 2, 0, 4); }

namespace {

double centroid(double e, double de) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double mu_e = membership(i, e);
        if (mu_e == 0.0) continue;
        for (int j = 0; j < 5; ++j) {
            const double w = std::min(mu_e, membership(j, de));
            if (w == 0.0) continue;
            num += w * kFuzzyCenters[static_cast<std::size_t>(fuzzy_rule(i, j))];
            den += w;
        }
    }
    return num / den;
}

}  // namespace

double fuzzy_increment(double scaled_error, double scaled_rate) {
    const double e = std::clamp(scaled_error, -1.0, 1.0);
    const double de = std::clamp(scaled_rate, -1.0, 1.0);
    // The rule table is odd; evaluate the lower half plane by reflection so the
    // symmetry also holds bit for bit.
    if (e < 0.0 || (e == 0.0 && de < 0.0)) return -centroid(-e, -de);
    return centroid(e, de) + 0.0;
}

double fuzzy_pi_step(FuzzyState& state, const FuzzyScaling& scaling, double error, double dt) {
    const double rate = state.primed ? (error - state.last_error) / dt : 0.0;
    state.last_error = error;
    state.primed = true;
    state.last_increment = fuzzy_increment(error * scaling.error, rate * scaling.error_rate);
    state.output = std::clamp(state.output + scaling.output * state.last_increment, -scaling.u_max, scaling.u_max);
    return state.output;
}

}  // namespace cadrobot::control
