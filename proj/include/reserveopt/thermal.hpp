#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reserveopt/step_function.hpp"

namespace reserveopt {

// Linear relaxation model of the building's internal temperature under
// normalized cooling power u in [0,1]:
//
//   x'(t) = -(x(t) - X_off + (X_off - X_on) * u(t)) / tau
//
// X_off and X_on are the asymptotic temperatures with the cooling equipment
// fully off (u = 0) and fully on (u = 1); tau is the thermal time constant.
struct ThermalParams {
    double tau;    // minutes
    double X_off;  // degC, asymptote with cooling off
    double X_on;   // degC, asymptote with cooling fully on
    double C_max;  // kW, maximum power draw of the cooling equipment

    void validate() const {
        if (!(tau > 0.0)) throw std::invalid_argument("ThermalParams: tau must be > 0");
        if (!(X_on < X_off)) throw std::invalid_argument("ThermalParams: X_on must be < X_off");
        if (!(C_max > 0.0)) throw std::invalid_argument("ThermalParams: C_max must be > 0");
    }

    double temperature_span() const { return X_off - X_on; }

    /// Asymptotic temperature under constant control u.
    double asymptote(double u) const { return X_off + (X_on - X_off) * u; }
};

// Temperature samples (time, degC) with strictly increasing times covering
// the full horizon. Breakpoint samples are exact; interior samples follow
// the closed-form solution on each constant-control interval.
struct TemperatureTrajectory {
    std::vector<double> times;
    std::vector<double> temperatures;

    double initial() const { return temperatures.front(); }
    double terminal() const { return temperatures.back(); }
    std::size_t size() const { return times.size(); }
};

/// Constant control holding the temperature fixed at x_level.
inline double steady_state_control(double x_level, const ThermalParams& p) {
    if (x_level < p.X_on || x_level > p.X_off) {
        throw std::domain_error(
            "steady_state_control: level " + std::to_string(x_level) +
            " outside [X_on, X_off]; holding control would leave [0,1]");
    }
    return (p.X_off - x_level) / (p.X_off - p.X_on);
}

// Closed-form state transition over an interval of constant control:
// x(dt) = v + exp(-dt/tau) * (x0 - v) with v the asymptote for u.
// Exact, so chaining over subintervals introduces no integration error.
inline double propagate(double x0, double u, double dt, const ThermalParams& p) {
    if (u < 0.0 || u > 1.0) {
        throw std::domain_error("propagate: control must lie in [0,1]");
    }
    if (dt < 0.0) {
        throw std::domain_error("propagate: dt must be >= 0");
    }
    const double v = p.asymptote(u);
    return v + std::exp(-dt / p.tau) * (x0 - v);
}

// Trajectory under a step control, sampled at every breakpoint plus
// sub_samples equally spaced points per interval. Breakpoint values are
// chained with propagate, so they are exact.
inline TemperatureTrajectory simulate(const StepFunction& profile, double x0,
                                      const ThermalParams& p, int sub_samples) {
    if (sub_samples < 1) {
        throw std::invalid_argument("simulate: sub_samples must be >= 1");
    }
    if (x0 < p.X_on || x0 > p.X_off) {
        throw std::domain_error("simulate: x0 outside [X_on, X_off]");
    }
    for (double u : profile.values()) {
        if (u < 0.0 || u > 1.0) {
            throw std::domain_error("simulate: control values must lie in [0,1]");
        }
    }

    TemperatureTrajectory traj;
    const auto& bp = profile.breakpoints();
    const auto& u = profile.values();
    traj.times.reserve(u.size() * static_cast<std::size_t>(sub_samples) + 1);
    traj.temperatures.reserve(traj.times.capacity());

    traj.times.push_back(bp.front());
    traj.temperatures.push_back(x0);
    double x_left = x0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double dt = bp[k + 1] - bp[k];
        const double v = p.asymptote(u[k]);
        for (int j = 1; j < sub_samples; ++j) {
            const double sigma = dt * j / sub_samples;
            traj.times.push_back(bp[k] + sigma);
            traj.temperatures.push_back(v + std::exp(-sigma / p.tau) * (x_left - v));
        }
        x_left = v + std::exp(-dt / p.tau) * (x_left - v);
        traj.times.push_back(bp[k + 1]);
        traj.temperatures.push_back(x_left);
    }
    return traj;
}

// Approximate landmark times of the optimal profiles. All three follow from
// solving the closed-form transition for the moment full cooling power must
// begin (or stop) so the temperature meets a bound exactly.

/// Time after which the optimal reference applies full power so that the
/// temperature reaches x_hat at the end of the horizon.
inline double landmark_full_power_onset(double T, double tau, double X_max,
                                        double X_on, double x_hat) {
    if (!(x_hat > X_on)) {
        throw std::domain_error("landmark_full_power_onset: requires X_hat > X_on");
    }
    return T - tau * std::log((X_max - X_on) / (x_hat - X_on));
}

/// Start of the sustained maximal-capacity window that ends at t2.
inline double landmark_capacity_window_start(double t2, double tau, double X_max,
                                             double X_on, double X_min) {
    if (!(X_min > X_on)) {
        throw std::domain_error("landmark_capacity_window_start: requires X_min > X_on");
    }
    return t2 - tau * std::log((X_max - X_on) / (X_min - X_on));
}

/// First time the temperature reaches X_min under initial full power.
inline double landmark_min_reach_time(double tau, double X_max, double X_on,
                                      double X_min) {
    if (!(X_min > X_on)) {
        throw std::domain_error("landmark_min_reach_time: requires X_min > X_on");
    }
    return tau * std::log((X_max - X_on) / (X_min - X_on));
}

}  // namespace reserveopt
