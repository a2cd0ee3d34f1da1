#pragma once

#include <stdexcept>

#include "reserveopt/profiles.hpp"
#include "reserveopt/smoothing.hpp"
#include "reserveopt/thermal.hpp"

namespace reserveopt {

// Night-time tariff: P is the price paid per kWh consumed, R the payment
// received per kWh consumed in excess of the reference profile while
// delivering reserve. gamma is the minimum total net profit demanded of an
// alternative profile, normalized so that gamma * C_max * P / 60 is pence.
struct EconomicsParams {
    double P;            // pence / kWh
    double R;            // pence / kWh
    double gamma = 0.0;  // dimensionless

    void validate() const {
        if (!(P > 0.0)) throw std::invalid_argument("EconomicsParams: P must be > 0");
        if (!(R > 0.0)) throw std::invalid_argument("EconomicsParams: R must be > 0");
        if (!(gamma >= 0.0)) throw std::invalid_argument("EconomicsParams: gamma must be >= 0");
    }

    double benefit_cost_ratio() const { return R / P; }
};

/// Total electricity cost of following u over the horizon, in pence.
/// The factor 1/60 converts kW-minutes to kWh.
inline double total_cost(const ControlProfile& u, const EconomicsParams& econ,
                         const ThermalParams& p) {
    return econ.P * p.C_max / 60.0 * u.integral();
}

// Cost of following u_alt net of utilization payments, which reward only
// consumption in excess of the reference level.
inline double total_net_cost(const ControlProfile& u_alt, const ControlProfile& u_ref,
                             const EconomicsParams& econ, const ThermalParams& p) {
    const StepFunction net = combine(
        u_alt.step(), u_ref.step(),
        [&](double a, double r) { return econ.P * a - econ.R * ramp(a - r); });
    return p.C_max / 60.0 * net.integral();
}

// Dimensionless saving-plus-payment of u_alt relative to u_ref at
// benefit-cost ratio R/P. Multiplying by C_max * P / 60 gives pence.
inline double normalized_net_profit(const ControlProfile& u_alt,
                                    const ControlProfile& u_ref, double ratio) {
    const StepFunction gain = combine(
        u_alt.step(), u_ref.step(),
        [&](double a, double r) { return r - a + ratio * ramp(a - r); });
    return gain.integral();
}

}  // namespace reserveopt
