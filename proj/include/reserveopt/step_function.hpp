#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace reserveopt {

// Two breakpoints produced by different code paths are treated as the same
// instant when they differ by less than this (minutes).
inline constexpr double kBreakpointTol = 1e-9;

// Piecewise-constant function of time on [t_0, t_n]: n+1 strictly increasing
// breakpoints and n values, one per subinterval [t_{k-1}, t_k). The value at
// the final time is the last piece's value (left-continuous closure).
// Values may be any real number; [0,1]-bounded controls are enforced by
// ControlProfile on top of this type.
class StepFunction {
  public:
    StepFunction() = default;

    StepFunction(std::vector<double> breakpoints, std::vector<double> values)
        : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
        if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size()) {
            throw std::invalid_argument(
                "StepFunction: need n+1 breakpoints for n >= 1 values");
        }
        for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
            if (!(breakpoints_[i] > breakpoints_[i - 1])) {
                throw std::invalid_argument(
                    "StepFunction: breakpoints must be strictly increasing");
            }
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::invalid_argument("StepFunction: non-finite value");
            }
        }
    }

    static StepFunction constant(double value, double t_begin, double t_end) {
        return StepFunction({t_begin, t_end}, {value});
    }

    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }
    std::size_t piece_count() const { return values_.size(); }
    double start_time() const { return breakpoints_.front(); }
    double end_time() const { return breakpoints_.back(); }
    double duration() const { return end_time() - start_time(); }

    /// Index of the piece containing t (the last piece for t == end_time()).
    std::size_t piece_index(double t) const {
        if (t < breakpoints_.front() - kBreakpointTol ||
            t > breakpoints_.back() + kBreakpointTol) {
            throw std::out_of_range("StepFunction: time " + std::to_string(t) +
                                    " outside horizon");
        }
        auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
        std::size_t idx = static_cast<std::size_t>(it - breakpoints_.begin());
        if (idx == 0) return 0;
        if (idx > values_.size()) return values_.size() - 1;
        return idx - 1;
    }

    double value_at(double t) const { return values_[piece_index(t)]; }

    /// Exact integral over the whole horizon.
    double integral() const {
        double acc = 0.0;
        for (std::size_t k = 0; k < values_.size(); ++k) {
            acc += values_[k] * (breakpoints_[k + 1] - breakpoints_[k]);
        }
        return acc;
    }

    double min_value() const {
        return *std::min_element(values_.begin(), values_.end());
    }
    double max_value() const {
        return *std::max_element(values_.begin(), values_.end());
    }

    bool same_horizon(const StepFunction& other) const {
        return std::abs(start_time() - other.start_time()) <= kBreakpointTol &&
               std::abs(end_time() - other.end_time()) <= kBreakpointTol;
    }

    /// Values re-sampled onto a refinement of this function's partition.
    /// Every original breakpoint must appear in `refined`.
    std::vector<double> resample(const std::vector<double>& refined) const {
        std::vector<double> out;
        out.reserve(refined.size() - 1);
        for (std::size_t k = 0; k + 1 < refined.size(); ++k) {
            const double mid = 0.5 * (refined[k] + refined[k + 1]);
            out.push_back(value_at(mid));
        }
        return out;
    }

  private:
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Sorted union of two breakpoint sequences, deduplicated to kBreakpointTol.
inline std::vector<double> merge_breakpoints(const std::vector<double>& a,
                                             const std::vector<double>& b) {
    std::vector<double> merged;
    merged.reserve(a.size() + b.size());
    merged.insert(merged.end(), a.begin(), a.end());
    merged.insert(merged.end(), b.begin(), b.end());
    std::sort(merged.begin(), merged.end());
    std::vector<double> out;
    out.reserve(merged.size());
    for (double t : merged) {
        if (out.empty() || t - out.back() > kBreakpointTol) {
            out.push_back(t);
        }
    }
    return out;
}

// Pointwise combination of two step functions on the union of their
// breakpoints. All integrals of the result are exact since no piece of
// either input is split by anything other than a shared breakpoint.
template <typename BinaryOp>
StepFunction combine(const StepFunction& a, const StepFunction& b, BinaryOp op) {
    if (!a.same_horizon(b)) {
        throw std::invalid_argument("combine: step functions have mismatched horizons");
    }
    std::vector<double> bp = merge_breakpoints(a.breakpoints(), b.breakpoints());
    std::vector<double> va = a.resample(bp);
    std::vector<double> vb = b.resample(bp);
    std::vector<double> out(va.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = op(va[k], vb[k]);
    }
    return StepFunction(std::move(bp), std::move(out));
}

}  // namespace reserveopt
