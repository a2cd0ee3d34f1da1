#pragma once

#include <stdexcept>
#include <string>

#include "reserveopt/economics.hpp"
#include "reserveopt/thermal.hpp"

namespace reserveopt {

// Weights and tolerances for the constraint loss functionals and the
// sharpness of the smooth surrogates used inside the optimizer. Lambda
// weights default to the horizon length so the terminal loss is comparable
// in magnitude to the running loss integral.
struct LossConfig {
    double lambda_state = 360.0;
    double lambda_delivery = 360.0;
    double epsilon_state = 1e-4;     // degC^2 * min
    double epsilon_delivery = 1e-4;  // min
    double theta = 50.0;

    void validate() const {
        if (!(lambda_state > 0.0)) throw std::invalid_argument("LossConfig: lambda_state must be > 0");
        if (!(lambda_delivery > 0.0)) throw std::invalid_argument("LossConfig: lambda_delivery must be > 0");
        if (!(epsilon_state >= 0.0)) throw std::invalid_argument("LossConfig: epsilon_state must be >= 0");
        if (!(epsilon_delivery >= 0.0)) throw std::invalid_argument("LossConfig: epsilon_delivery must be >= 0");
        if (!(theta > 0.0)) throw std::invalid_argument("LossConfig: theta must be > 0");
    }
};

// A complete problem instance: building physics, comfort band, pre-cooling
// target, starting temperature, tariff, and regularizer weights.
struct Scenario {
    double T = 360.0;  // minutes
    ThermalParams thermal{120.0, 35.0, 10.0, 100.0};
    double X_min = 18.0;  // degC, overnight lower comfort limit
    double X_max = 27.0;  // degC, overnight upper comfort limit
    double X_hat = 18.0;  // degC, upper limit on the terminal temperature
    double x0 = 27.0;     // degC, temperature at the start of the horizon
    EconomicsParams econ{10.0, 10.0, 0.0};
    double alpha_ref = 0.01;
    double alpha_alt = 0.01;
    double alpha_del = 0.01;
    LossConfig loss;

    void validate() const {
        thermal.validate();
        econ.validate();
        loss.validate();
        if (!(T > 0.0)) throw std::invalid_argument("Scenario: T must be > 0");
        if (!(thermal.X_on < X_min)) {
            throw std::invalid_argument("Scenario: X_min must exceed X_on");
        }
        if (!(X_min < X_max)) {
            throw std::invalid_argument("Scenario: X_min must be below X_max");
        }
        if (!(X_max < thermal.X_off)) {
            throw std::invalid_argument("Scenario: X_max must be below X_off");
        }
        if (X_hat < X_min || X_hat > X_max) {
            throw std::invalid_argument("Scenario: X_hat must lie in [X_min, X_max]");
        }
        if (x0 < X_min || x0 > X_max) {
            throw std::invalid_argument("Scenario: x0 must lie in [X_min, X_max]");
        }
        if (!(alpha_ref > 0.0)) throw std::invalid_argument("Scenario: alpha_ref must be > 0");
        if (!(alpha_alt > 0.0)) throw std::invalid_argument("Scenario: alpha_alt must be > 0");
        if (!(alpha_del > 0.0)) throw std::invalid_argument("Scenario: alpha_del must be > 0");
    }
};

/// Time after which the optimal reference profile applies full power.
inline double landmark_t2(const Scenario& s) {
    return landmark_full_power_onset(s.T, s.thermal.tau, s.X_max, s.thermal.X_on,
                                     s.X_hat);
}

/// Start of the sustained maximal-capacity window ending at t2.
inline double landmark_t_hat(const Scenario& s, double t2) {
    if (!(t2 > 0.0 && t2 <= s.T)) {
        throw std::domain_error("landmark_t_hat: t2 must lie in (0, T]");
    }
    return landmark_capacity_window_start(t2, s.thermal.tau, s.X_max, s.thermal.X_on,
                                          s.X_min);
}

/// First time the temperature reaches X_min under initial full power.
inline double landmark_t_check(const Scenario& s) {
    return landmark_min_reach_time(s.thermal.tau, s.X_max, s.thermal.X_on, s.X_min);
}

enum class CapacityCase { Case1, Case3 };

// Approximate normalized level of the sustained capacity window: in Case 1
// the alternative profile runs at full power against the reference plateau;
// in Case 3 it holds the temperature at X_min instead of X_max.
inline double sustained_capacity_level(CapacityCase c, const Scenario& s) {
    const double span = s.thermal.temperature_span();
    switch (c) {
        case CapacityCase::Case1:
            return (s.X_max - s.thermal.X_on) / span;
        case CapacityCase::Case3:
            return (s.X_max - s.X_min) / span;
    }
    throw std::logic_error("sustained_capacity_level: unknown case");
}

}  // namespace reserveopt
