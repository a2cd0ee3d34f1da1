#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reserveopt/step_function.hpp"

namespace reserveopt {

// Normalized power schedule: a step function starting at t = 0 whose values
// all lie in [0,1]. This is the only control representation the library
// optimizes over or simulates.
class ControlProfile {
  public:
    ControlProfile() = default;

    explicit ControlProfile(StepFunction f) : f_(std::move(f)) {
        if (std::abs(f_.start_time()) > kBreakpointTol) {
            throw std::invalid_argument("ControlProfile: horizon must start at 0");
        }
        for (double v : f_.values()) {
            if (v < 0.0 || v > 1.0) {
                throw std::invalid_argument(
                    "ControlProfile: value " + std::to_string(v) + " outside [0,1]");
            }
        }
    }

    ControlProfile(std::vector<double> breakpoints, std::vector<double> values)
        : ControlProfile(StepFunction(std::move(breakpoints), std::move(values))) {}

    static ControlProfile constant(double u, double T) {
        return ControlProfile(StepFunction::constant(u, 0.0, T));
    }

    const StepFunction& step() const { return f_; }
    const std::vector<double>& breakpoints() const { return f_.breakpoints(); }
    const std::vector<double>& values() const { return f_.values(); }
    double horizon() const { return f_.end_time(); }
    double value_at(double t) const { return f_.value_at(t); }
    double integral() const { return f_.integral(); }

  private:
    StepFunction f_;
};

/// Fraction of maximum power drawn by an actual power level C (kW).
inline double normalize(double C, double C_max) {
    if (C < 0.0 || C > C_max) {
        throw std::domain_error("normalize: power outside [0, C_max]");
    }
    return C / C_max;
}

// One reserve-service instruction: raise consumption by u_ask (normalized)
// above the reference level on [start, end).
struct Instruction {
    double u_ask;
    double start;  // minutes
    double end;    // minutes
};

class infeasible_instruction : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Contiguous block of reserve instructions: each window ends where the next
// begins. An empty sequence means no reserve was requested.
class InstructionSequence {
  public:
    InstructionSequence() = default;

    InstructionSequence(std::vector<Instruction> items, double horizon)
        : items_(std::move(items)) {
        for (std::size_t i = 0; i < items_.size(); ++i) {
            const auto& it = items_[i];
            const std::string tag = "instruction " + std::to_string(i);
            if (!(it.u_ask >= 0.0)) {
                throw std::invalid_argument(tag + ": u_ask must be >= 0");
            }
            if (!(it.start >= 0.0 && it.start < it.end && it.end <= horizon + kBreakpointTol)) {
                throw std::invalid_argument(tag + ": requires 0 <= start < end <= T");
            }
            if (i > 0 && std::abs(items_[i - 1].end - it.start) > kBreakpointTol) {
                throw std::invalid_argument(tag + ": windows must be contiguous");
            }
        }
    }

    bool empty() const { return items_.empty(); }
    std::size_t size() const { return items_.size(); }
    const std::vector<Instruction>& items() const { return items_; }

    /// Times that must appear in any partition used to deliver the service.
    std::vector<double> window_times() const {
        std::vector<double> out;
        for (const auto& it : items_) {
            out.push_back(it.start);
            out.push_back(it.end);
        }
        return out;
    }

  private:
    std::vector<Instruction> items_;
};

/// Instantaneous declared reserve u_alt - u_ref on the union of breakpoints.
/// May be negative where the alternative profile pays back.
inline StepFunction capacity_profile(const ControlProfile& u_alt,
                                     const ControlProfile& u_ref) {
    return combine(u_alt.step(), u_ref.step(),
                   [](double a, double r) { return a - r; });
}

/// True when the capacity profile delivers non-negative reserve in total,
/// even if instantaneous reserve dips negative.
inline bool has_total_decremental_reserve(const StepFunction& u_cap) {
    return u_cap.integral() >= 0.0;
}

// Minimal instructed power usage: u_ref + u_ask inside each instruction
// window, zero outside. A window that would require exceeding full power is
// an infeasible instruction, reported rather than clipped.
inline ControlProfile instructed_min_profile(const ControlProfile& u_ref,
                                             const InstructionSequence& ins) {
    const double T = u_ref.horizon();
    if (ins.empty()) {
        return ControlProfile::constant(0.0, T);
    }
    std::vector<double> bp = merge_breakpoints(u_ref.breakpoints(), ins.window_times());
    std::vector<double> ref = u_ref.step().resample(bp);
    std::vector<double> vals(ref.size(), 0.0);
    for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
        const double mid = 0.5 * (bp[k] + bp[k + 1]);
        for (std::size_t i = 0; i < ins.size(); ++i) {
            const auto& it = ins.items()[i];
            if (mid >= it.start && mid < it.end) {
                double v = ref[k] + it.u_ask;
                if (v > 1.0 + 1e-9) {
                    throw infeasible_instruction(
                        "instruction " + std::to_string(i) + " requires normalized power " +
                        std::to_string(v) + " > 1 at t = " + std::to_string(bp[k]));
                }
                vals[k] = std::min(v, 1.0);
                break;
            }
        }
    }
    return ControlProfile(std::move(bp), std::move(vals));
}

}  // namespace reserveopt
