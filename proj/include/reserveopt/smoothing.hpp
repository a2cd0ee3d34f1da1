#pragma once

#include <cmath>
#include <stdexcept>

namespace reserveopt {

/// Numerically safe logistic function 1 / (1 + exp(-z)).
inline double logistic(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

// Softplus approximation of max(0, y) with sharpness theta.
// For theta*y > 30 the direct form overflows, so we switch to the
// asymptote y + log1p(exp(-theta*y))/theta.
inline double smooth_ramp(double y, double theta) {
    if (!(theta > 0.0)) {
        throw std::domain_error("smooth_ramp: theta must be > 0");
    }
    const double z = theta * y;
    if (z > 30.0) {
        return y + std::log1p(std::exp(-z)) / theta;
    }
    return std::log1p(std::exp(z)) / theta;
}

/// Derivative of smooth_ramp with respect to y; equals logistic(theta*y).
inline double smooth_ramp_derivative(double y, double theta) {
    return logistic(theta * y);
}

// Smooth approximation of the indicator of [a, b]: the product of a rising
// logistic at a and a falling logistic at b.
inline double smooth_indicator(double y, double a, double b, double theta) {
    if (!(a < b)) {
        throw std::domain_error("smooth_indicator: requires a < b");
    }
    if (!(theta > 0.0)) {
        throw std::domain_error("smooth_indicator: theta must be > 0");
    }
    return logistic(theta * (y - a)) * logistic(theta * (b - y));
}

/// Exact positive part max(0, y).
inline double ramp(double y) { return y > 0.0 ? y : 0.0; }

}  // namespace reserveopt
