#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "reserveopt/losses.hpp"
#include "reserveopt/profiles.hpp"
#include "reserveopt/scenario.hpp"
#include "reserveopt/smoothing.hpp"

namespace reserveopt {

enum class ProblemKind { Reference, Capacity, Delivery };

inline const char* to_string(ProblemKind k) {
    switch (k) {
        case ProblemKind::Reference: return "reference";
        case ProblemKind::Capacity: return "capacity";
        case ProblemKind::Delivery: return "delivery";
    }
    return "unknown";
}

// Positive-part handling: the exact ramp for reported values, the softplus
// surrogate inside the optimizer.
enum class RampMode { Exact, Smoothed };

struct Evaluation {
    double objective = 0.0;
    std::vector<double> objective_gradient;
    std::vector<double> constraint_values;  // g_i(u) <= 0 means feasible
    std::vector<std::vector<double>> constraint_gradients;
};

// Exact (unsmoothed, un-relaxed) residual summary of a candidate control,
// used for post-hoc verification independent of theta and epsilon.
struct ExactChecks {
    double max_state_violation = 0.0;       // degC above X_max / below X_min on the grid
    double terminal_upper_violation = 0.0;  // degC above X_hat at time T
    double terminal_lower_violation = 0.0;  // degC below X_min at time T
    double psi1_min = 0.0;                  // min over grid of (X_max - x)(x - X_min)
    double phi1_terminal = 0.0;             // (X_hat - x(T))(x(T) - X_min)
    double state_loss = 0.0;
    double delivery_min_residual = std::numeric_limits<double>::infinity();
    double delivery_loss = 0.0;
    double financial_value = std::numeric_limits<double>::quiet_NaN();  // <= 0 feasible

    double worst_violation() const {
        double v = std::max({max_state_violation, terminal_upper_violation,
                             terminal_lower_violation});
        if (std::isfinite(delivery_min_residual)) {
            v = std::max(v, std::max(0.0, -delivery_min_residual));
        }
        if (std::isfinite(financial_value)) {
            v = std::max(v, std::max(0.0, financial_value));
        }
        return v;
    }
};

// One of the three optimization problems transcribed onto a step-control
// partition: n_p parameters in the box [0,1], an objective, and inequality
// constraints built from the loss functionals. Immutable after construction;
// all evaluation methods are pure.
class AssembledProblem {
  public:
    ProblemKind kind() const { return kind_; }
    std::size_t dimension() const { return dt_.size(); }
    const std::vector<double>& breakpoints() const { return bp_; }
    const std::vector<double>& interval_lengths() const { return dt_; }
    int sub_samples() const { return sub_; }
    double box_lower() const { return 0.0; }
    double box_upper() const { return 1.0; }
    const Scenario& scenario() const { return s_; }
    const std::optional<ControlProfile>& reference() const { return u_ref_; }
    const std::optional<ControlProfile>& instructed_minimum() const { return u_ins_; }
    const InstructionSequence& instructions() const { return instructions_; }
    double regularizer() const { return alpha_; }
    double benefit_cost_ratio() const { return ratio_; }

    std::size_t constraint_count() const { return constraint_names_.size(); }
    const std::vector<std::string>& constraint_names() const { return constraint_names_; }

    ControlProfile make_profile(std::span<const double> u) const {
        require_dim(u);
        std::vector<double> vals(u.begin(), u.end());
        for (double& v : vals) v = std::min(1.0, std::max(0.0, v));
        return ControlProfile(bp_, std::move(vals));
    }

    // ---- objective and constraints ------------------------------------

    double objective(std::span<const double> u, std::vector<double>* grad,
                     RampMode mode) const {
        require_dim(u);
        if (grad) grad->assign(dimension(), 0.0);
        double value = 0.0;
        for (std::size_t k = 0; k < dimension(); ++k) {
            value += alpha_ * dt_[k] * u[k] * u[k];
            if (grad) (*grad)[k] += 2.0 * alpha_ * dt_[k] * u[k];
        }
        if (kind_ == ProblemKind::Capacity) {
            for (std::size_t k = 0; k < dimension(); ++k) {
                for (const Piece& p : pieces_[k]) {
                    const double d = u[k] - p.ref;
                    value += p.width * (u[k] - ratio_ * positive_part(d, mode));
                    if (grad) {
                        (*grad)[k] += p.width * (1.0 - ratio_ * positive_part_derivative(d, mode));
                    }
                }
            }
        } else {
            for (std::size_t k = 0; k < dimension(); ++k) {
                value += dt_[k] * u[k];
                if (grad) (*grad)[k] += dt_[k];
            }
        }
        return value;
    }

    double constraint(std::size_t i, std::span<const double> u,
                      std::vector<double>* grad, RampMode mode) const {
        if (i >= constraint_count()) {
            throw std::out_of_range("AssembledProblem: constraint index");
        }
        if (i == 0) {
            return state_loss(u, grad) - s_.loss.epsilon_state;
        }
        if (kind_ == ProblemKind::Capacity) {
            return financial_value(u, grad, mode);
        }
        return delivery_loss(u, grad) - s_.loss.epsilon_delivery;
    }

    /// Bundle of exact-ramp objective, constraint values and analytic
    /// gradients. Throws on non-finite parameters or intermediates.
    Evaluation evaluate(std::span<const double> u) const {
        require_dim(u);
        for (std::size_t k = 0; k < u.size(); ++k) {
            if (!std::isfinite(u[k])) {
                throw std::runtime_error(
                    "evaluate: non-finite parameter at index " + std::to_string(k));
            }
        }
        Evaluation ev;
        ev.objective = objective(u, &ev.objective_gradient, RampMode::Exact);
        ev.constraint_values.resize(constraint_count());
        ev.constraint_gradients.resize(constraint_count());
        for (std::size_t i = 0; i < constraint_count(); ++i) {
            ev.constraint_values[i] = constraint(i, u, &ev.constraint_gradients[i],
                                                 RampMode::Exact);
        }
        check_finite(ev.objective, "objective");
        for (std::size_t i = 0; i < constraint_count(); ++i) {
            check_finite(ev.constraint_values[i], "constraint " + std::to_string(i));
        }
        return ev;
    }

    // ---- state propagation on the transcription grid ------------------

    // Temperatures at interval endpoints (x_0..x_n) and at every quadrature
    // sample. Sample (k, j) sits at offset j*dt_k/sub within interval k;
    // j = 0 duplicates the left endpoint, j = sub the right one.
    struct States {
        std::vector<double> endpoint;
        std::vector<double> sample;
    };

    std::size_t sample_count() const {
        return dimension() * static_cast<std::size_t>(sub_ + 1);
    }
    std::size_t sample_index(std::size_t k, int j) const {
        return k * static_cast<std::size_t>(sub_ + 1) + static_cast<std::size_t>(j);
    }
    double sample_time(std::size_t k, int j) const {
        return bp_[k] + dt_[k] * j / sub_;
    }

    States compute_states(std::span<const double> u) const {
        require_dim(u);
        States st;
        st.endpoint.resize(dimension() + 1);
        st.sample.resize(sample_count());
        st.endpoint[0] = s_.x0;
        for (std::size_t k = 0; k < dimension(); ++k) {
            const double v = s_.thermal.asymptote(u[k]);
            const double xk = st.endpoint[k];
            for (int j = 0; j <= sub_; ++j) {
                st.sample[sample_index(k, j)] = v + F_[k][j] * (xk - v);
            }
            st.endpoint[k + 1] = st.sample[sample_index(k, sub_)];
        }
        return st;
    }

    // Accumulates d/du of sum_s coeff[s] * x_s + terminal_coeff * x(T) into
    // grad, via one backward sweep through the exact transition factors.
    void add_state_sensitivity(std::span<const double> sample_coeff,
                               double terminal_coeff,
                               std::span<double> grad) const {
        const double A = s_.thermal.X_on - s_.thermal.X_off;  // d asymptote / du
        double M = terminal_coeff;  // adjoint of the endpoint entering interval k+1
        for (std::size_t k = dimension(); k-- > 0;) {
            double D = 0.0;  // sensitivity routed to the left endpoint x_k
            double G = 0.0;  // sensitivity routed directly to u_k
            for (int j = 0; j <= sub_; ++j) {
                const double c = sample_coeff[sample_index(k, j)];
                D += c * F_[k][j];
                G += c * (1.0 - F_[k][j]);
            }
            const double E = F_[k][sub_];
            grad[k] += A * (G + (1.0 - E) * M);
            M = D + E * M;
        }
    }

    // The dynamics are linear and the control piecewise constant, so every
    // sample temperature is affine in the parameter vector. Row s of the
    // sensitivity matrix holds d x_s / d u (zero beyond the sample's
    // interval); solvers can build exact Gauss-Newton Hessians from it.
    const std::vector<double>& state_sensitivity() const { return sens_; }
    std::span<const double> sensitivity_row(std::size_t sample) const {
        return {sens_.data() + sample * dimension(), dimension()};
    }
    std::span<const double> terminal_sensitivity() const {
        return sensitivity_row(sample_index(dimension() - 1, sub_));
    }

    // ---- constraint building blocks ------------------------------------

    /// Appendix-style running + terminal state loss over the quadrature grid.
    double state_loss(std::span<const double> u, std::vector<double>* grad) const {
        const States st = compute_states(u);
        return state_loss_from(st, grad);
    }

    double state_loss_from(const States& st, std::vector<double>* grad) const {
        double value = 0.0;
        std::vector<double> coeff;
        if (grad) {
            grad->assign(dimension(), 0.0);
            coeff.assign(sample_count(), 0.0);
        }
        for (std::size_t k = 0; k < dimension(); ++k) {
            const double h = dt_[k] / sub_;
            for (int j = 0; j <= sub_; ++j) {
                const double x = st.sample[sample_index(k, j)];
                const double w = (j == 0 || j == sub_) ? 0.5 * h : h;
                const double psi = (s_.X_max - x) * (x - s_.X_min);
                const double neg = std::min(0.0, psi);
                value += w * neg * neg;
                if (grad && neg < 0.0) {
                    coeff[sample_index(k, j)] =
                        w * 2.0 * neg * (s_.X_max + s_.X_min - 2.0 * x);
                }
            }
        }
        const double xT = st.endpoint.back();
        const double phi = (s_.X_hat - xT) * (xT - s_.X_min);
        const double negT = std::min(0.0, phi);
        value += s_.loss.lambda_state * negT * negT;
        if (grad) {
            const double cT =
                negT < 0.0 ? s_.loss.lambda_state * 2.0 * negT *
                                 (s_.X_hat + s_.X_min - 2.0 * xT)
                           : 0.0;
            add_state_sensitivity(coeff, cT, *grad);
        }
        return value;
    }

    /// Delivery-family loss; exact since control and instructed minimum are
    /// both constant on every piece.
    double delivery_loss(std::span<const double> u, std::vector<double>* grad) const {
        require_dim(u);
        if (grad) grad->assign(dimension(), 0.0);
        double value = 0.0;
        for (std::size_t k = 0; k < dimension(); ++k) {
            for (const Piece& p : pieces_[k]) {
                const double neg = std::min(0.0, u[k] - p.ins);
                value += p.width * neg * neg;
                if (grad && neg < 0.0) (*grad)[k] += p.width * 2.0 * neg;
            }
        }
        return value;
    }

    /// Financial constraint of the capacity problem:
    /// integral of [u - u_ref - (R/P) (u - u_ref)^+] plus gamma, <= 0 feasible.
    double financial_value(std::span<const double> u, std::vector<double>* grad,
                           RampMode mode) const {
        require_dim(u);
        if (grad) grad->assign(dimension(), 0.0);
        double value = s_.econ.gamma;
        for (std::size_t k = 0; k < dimension(); ++k) {
            for (const Piece& p : pieces_[k]) {
                const double d = u[k] - p.ref;
                value += p.width * (d - ratio_ * positive_part(d, mode));
                if (grad) {
                    (*grad)[k] += p.width * (1.0 - ratio_ * positive_part_derivative(d, mode));
                }
            }
        }
        return value;
    }

    /// Per-interval lower bounds implied by the instructed minimum (zero
    /// where no instruction applies). Exactly representable in the box.
    std::vector<double> delivery_floor() const {
        std::vector<double> floor(dimension(), 0.0);
        if (kind_ == ProblemKind::Delivery) {
            for (std::size_t k = 0; k < dimension(); ++k) {
                for (const Piece& p : pieces_[k]) {
                    floor[k] = std::max(floor[k], p.ins);
                }
            }
        }
        return floor;
    }

    ExactChecks exact_checks(std::span<const double> u) const {
        const States st = compute_states(u);
        ExactChecks c;
        c.psi1_min = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < dimension(); ++k) {
            for (int j = 0; j <= sub_; ++j) {
                const double x = st.sample[sample_index(k, j)];
                c.max_state_violation = std::max(
                    {c.max_state_violation, x - s_.X_max, s_.X_min - x});
                c.psi1_min = std::min(c.psi1_min, (s_.X_max - x) * (x - s_.X_min));
            }
        }
        const double xT = st.endpoint.back();
        c.terminal_upper_violation = std::max(0.0, xT - s_.X_hat);
        c.terminal_lower_violation = std::max(0.0, s_.X_min - xT);
        c.phi1_terminal = (s_.X_hat - xT) * (xT - s_.X_min);
        c.state_loss = state_loss_from(st, nullptr);
        if (kind_ == ProblemKind::Delivery) {
            c.delivery_loss = delivery_loss(u, nullptr);
            for (std::size_t k = 0; k < dimension(); ++k) {
                for (const Piece& p : pieces_[k]) {
                    c.delivery_min_residual =
                        std::min(c.delivery_min_residual, u[k] - p.ins);
                }
            }
        }
        if (kind_ == ProblemKind::Capacity) {
            c.financial_value = financial_value(u, nullptr, RampMode::Exact);
        }
        return c;
    }

    friend AssembledProblem build_reference(const Scenario& s, int n_p, int sub_samples);
    friend AssembledProblem build_capacity(const Scenario& s, const ControlProfile& u_ref,
                                           int n_p, int sub_samples);
    friend AssembledProblem build_delivery(const Scenario& s, const ControlProfile& u_ref,
                                           const InstructionSequence& ins, int n_p,
                                           int sub_samples);

  private:
    // Slice of one parameter interval on which the reference and instructed
    // profiles are both constant; keeps every integral exact.
    struct Piece {
        double width;
        double ref;
        double ins;
    };

    AssembledProblem() = default;

    void require_dim(std::span<const double> u) const {
        if (u.size() != dimension()) {
            throw std::invalid_argument("AssembledProblem: parameter vector has size " +
                                        std::to_string(u.size()) + ", expected " +
                                        std::to_string(dimension()));
        }
    }

    static void check_finite(double v, const std::string& what) {
        if (!std::isfinite(v)) {
            throw std::runtime_error("evaluate: non-finite " + what);
        }
    }

    double positive_part(double y, RampMode mode) const {
        return mode == RampMode::Exact ? ramp(y) : smooth_ramp(y, s_.loss.theta);
    }
    double positive_part_derivative(double y, RampMode mode) const {
        if (mode == RampMode::Smoothed) return smooth_ramp_derivative(y, s_.loss.theta);
        if (y > 0.0) return 1.0;
        return y < 0.0 ? 0.0 : 0.5;
    }

    void finalize_grid() {
        const std::size_t n = bp_.size() - 1;
        dt_.resize(n);
        F_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            dt_[k] = bp_[k + 1] - bp_[k];
            F_[k].resize(static_cast<std::size_t>(sub_) + 1);
            for (int j = 0; j <= sub_; ++j) {
                F_[k][j] = std::exp(-(dt_[k] * j / sub_) / s_.thermal.tau);
            }
        }
        // Sensitivity rows, chained through the exact transition factors:
        // endpoint row scales by E_k per interval, sample rows scale the
        // previous endpoint row by the in-interval factor.
        const double A = s_.thermal.X_on - s_.thermal.X_off;
        sens_.assign(n * (static_cast<std::size_t>(sub_) + 1) * n, 0.0);
        std::vector<double> endpoint_row(n, 0.0);  // d x_k / d u before interval k
        for (std::size_t k = 0; k < n; ++k) {
            const double E = F_[k][sub_];
            for (int j = 0; j <= sub_; ++j) {
                double* row = sens_.data() + sample_index(k, j) * n;
                for (std::size_t m = 0; m < k; ++m) {
                    row[m] = F_[k][j] * endpoint_row[m];
                }
                row[k] = A * (1.0 - F_[k][j]);
            }
            for (std::size_t m = 0; m < k; ++m) endpoint_row[m] *= E;
            endpoint_row[k] = A * (1.0 - E);
        }
    }

    // Splits each parameter interval at the breakpoints of the reference and
    // instructed profiles lying inside it.
    void build_pieces() {
        pieces_.assign(dimension(), {});
        std::vector<double> cuts;
        if (u_ref_) cuts = u_ref_->breakpoints();
        if (u_ins_) cuts = merge_breakpoints(cuts, u_ins_->breakpoints());
        for (std::size_t k = 0; k < dimension(); ++k) {
            std::vector<double> local{bp_[k], bp_[k + 1]};
            for (double c : cuts) {
                if (c > bp_[k] + kBreakpointTol && c < bp_[k + 1] - kBreakpointTol) {
                    local.push_back(c);
                }
            }
            std::sort(local.begin(), local.end());
            for (std::size_t q = 0; q + 1 < local.size(); ++q) {
                const double mid = 0.5 * (local[q] + local[q + 1]);
                Piece p;
                p.width = local[q + 1] - local[q];
                p.ref = u_ref_ ? u_ref_->value_at(mid) : 0.0;
                p.ins = u_ins_ ? u_ins_->value_at(mid) : 0.0;
                pieces_[k].push_back(p);
            }
        }
    }

    ProblemKind kind_ = ProblemKind::Reference;
    Scenario s_;
    std::vector<double> bp_;
    std::vector<double> dt_;
    int sub_ = 10;
    std::vector<std::vector<double>> F_;
    std::vector<double> sens_;
    std::vector<std::vector<Piece>> pieces_;
    std::optional<ControlProfile> u_ref_;
    std::optional<ControlProfile> u_ins_;
    InstructionSequence instructions_;
    double alpha_ = 0.0;
    double ratio_ = 0.0;
    std::vector<std::string> constraint_names_;
};

inline std::vector<double> uniform_partition(double T, int n_p) {
    std::vector<double> bp(static_cast<std::size_t>(n_p) + 1);
    for (int k = 0; k <= n_p; ++k) {
        bp[static_cast<std::size_t>(k)] = T * k / n_p;
    }
    bp.back() = T;
    return bp;
}

/// Problem 1: minimal-cost reference schedule under the comfort band and the
/// pre-cooling terminal bound.
inline AssembledProblem build_reference(const Scenario& s, int n_p,
                                        int sub_samples = 10) {
    s.validate();
    if (n_p < 2) throw std::invalid_argument("build_reference: n_p must be >= 2");
    if (sub_samples < 1) throw std::invalid_argument("build_reference: sub_samples must be >= 1");
    AssembledProblem p;
    p.kind_ = ProblemKind::Reference;
    p.s_ = s;
    p.sub_ = sub_samples;
    p.bp_ = uniform_partition(s.T, n_p);
    p.alpha_ = s.alpha_ref;
    p.constraint_names_ = {"state_loss"};
    p.finalize_grid();
    p.build_pieces();
    return p;
}

/// Problem 2: minimal net-cost alternative schedule against a given
/// reference, subject to the comfort band and the financial floor.
inline AssembledProblem build_capacity(const Scenario& s, const ControlProfile& u_ref,
                                       int n_p, int sub_samples = 10) {
    s.validate();
    if (n_p < 2) throw std::invalid_argument("build_capacity: n_p must be >= 2");
    if (sub_samples < 1) throw std::invalid_argument("build_capacity: sub_samples must be >= 1");
    if (std::abs(u_ref.horizon() - s.T) > kBreakpointTol) {
        throw std::invalid_argument("build_capacity: reference profile horizon differs from T");
    }
    AssembledProblem p;
    p.kind_ = ProblemKind::Capacity;
    p.s_ = s;
    p.sub_ = sub_samples;
    p.bp_ = uniform_partition(s.T, n_p);
    p.u_ref_ = u_ref;
    p.alpha_ = s.alpha_alt;
    p.ratio_ = s.econ.benefit_cost_ratio();
    p.constraint_names_ = {"state_loss", "financial"};
    p.finalize_grid();
    p.build_pieces();
    return p;
}

/// Problem 3: minimal-power delivery of a reserve instruction sequence. The
/// partition is refined so every instruction window boundary is a breakpoint.
inline AssembledProblem build_delivery(const Scenario& s, const ControlProfile& u_ref,
                                       const InstructionSequence& ins, int n_p,
                                       int sub_samples = 10) {
    s.validate();
    if (n_p < 2) throw std::invalid_argument("build_delivery: n_p must be >= 2");
    if (sub_samples < 1) throw std::invalid_argument("build_delivery: sub_samples must be >= 1");
    if (std::abs(u_ref.horizon() - s.T) > kBreakpointTol) {
        throw std::invalid_argument("build_delivery: reference profile horizon differs from T");
    }
    AssembledProblem p;
    p.kind_ = ProblemKind::Delivery;
    p.s_ = s;
    p.sub_ = sub_samples;
    p.bp_ = merge_breakpoints(uniform_partition(s.T, n_p), ins.window_times());
    p.u_ref_ = u_ref;
    p.u_ins_ = instructed_min_profile(u_ref, ins);
    p.instructions_ = ins;
    p.alpha_ = s.alpha_del;
    p.constraint_names_ = {"state_loss", "delivery_loss"};
    p.finalize_grid();
    p.build_pieces();
    return p;
}

}  // namespace reserveopt
