#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "reserveopt/profiles.hpp"
#include "reserveopt/scenario.hpp"

namespace reserveopt {

// Constraint residuals in functional form. A residual >= 0 means the
// underlying constraint holds at that point; the loss functionals below
// penalize only the negative part.

/// Running and terminal state residuals at temperature x:
/// psi1 = (X_max - x)(x - X_min), phi1 = (X_hat - x)(x - X_min).
inline std::pair<double, double> state_residuals(double /*t*/, double x,
                                                 const Scenario& s) {
    const double psi1 = (s.X_max - x) * (x - s.X_min);
    const double phi1 = (s.X_hat - x) * (x - s.X_min);
    return {psi1, phi1};
}

/// Delivery residual: consumption above the minimal instructed level.
/// The delivery family has no terminal component.
inline double delivery_residual(double /*t*/, double u, double u_ins_at_t) {
    return u - u_ins_at_t;
}

inline double negative_part_squared(double y) {
    const double n = std::min(0.0, y);
    return n * n;
}

enum class LossFamily { State, Delivery };

// Total loss for the state family: the squared negative part of psi1
// integrated by composite trapezoid over the sub-sampled simulation grid,
// plus the weighted squared negative part of phi1 at the terminal state.
// Zero exactly when the temperature constraints hold on the grid.
inline double total_state_loss(const ControlProfile& u, const Scenario& s,
                               const LossConfig& cfg, int sub_samples) {
    const auto& bp = u.breakpoints();
    const auto& vals = u.values();
    double running = 0.0;
    double x_left = s.x0;
    for (std::size_t k = 0; k < vals.size(); ++k) {
        const double dt = bp[k + 1] - bp[k];
        const double h = dt / sub_samples;
        const double v = s.thermal.asymptote(vals[k]);
        for (int j = 0; j <= sub_samples; ++j) {
            const double sigma = dt * j / sub_samples;
            const double x = v + std::exp(-sigma / s.thermal.tau) * (x_left - v);
            const double w = (j == 0 || j == sub_samples) ? 0.5 * h : h;
            running += w * negative_part_squared(state_residuals(bp[k] + sigma, x, s).first);
        }
        x_left = v + std::exp(-dt / s.thermal.tau) * (x_left - v);
    }
    const double phi1 = state_residuals(bp.back(), x_left, s).second;
    return running + cfg.lambda_state * negative_part_squared(phi1);
}

// Total loss for the delivery family. Both the control and the instructed
// minimum are step functions, so the integral is exact over the merged
// partition; there is no terminal component.
inline double total_delivery_loss(const ControlProfile& u, const ControlProfile& u_ins,
                                  const LossConfig& /*cfg*/) {
    const StepFunction sq = combine(u.step(), u_ins.step(), [](double uu, double ii) {
        return negative_part_squared(delivery_residual(0.0, uu, ii));
    });
    return sq.integral();
}

/// Dispatcher over the two constraint families. The delivery family
/// requires u_ins; the state family ignores it.
inline double total_loss(LossFamily family, const ControlProfile& u, const Scenario& s,
                         const LossConfig& cfg, int sub_samples,
                         const ControlProfile* u_ins = nullptr) {
    switch (family) {
        case LossFamily::State:
            return total_state_loss(u, s, cfg, sub_samples);
        case LossFamily::Delivery:
            if (u_ins == nullptr) {
                throw std::invalid_argument("total_loss: delivery family needs u_ins");
            }
            return total_delivery_loss(u, *u_ins, cfg);
    }
    throw std::logic_error("total_loss: unknown family");
}

}  // namespace reserveopt
