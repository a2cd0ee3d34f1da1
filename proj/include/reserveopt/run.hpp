#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "reserveopt/config_io.hpp"
#include "reserveopt/csv_io.hpp"
#include "reserveopt/problems.hpp"
#include "reserveopt/solver.hpp"

namespace reserveopt {

enum class Subcommand { SolveReference, SolveCapacity, SolveDelivery, Sweep };

// Benefit-cost ratios (and optionally capacity regularizer weights) to solve
// the capacity problem for, one summary row per solve.
struct SweepSpec {
    std::vector<double> ratios{0.75, 1.0, 1.25};
    std::vector<double> alphas;  // empty: keep the scenario's alpha_alt

    void validate() const {
        if (ratios.empty()) throw std::invalid_argument("sweep: ratios must be non-empty");
        for (double r : ratios) {
            if (!(r > 0.0)) throw std::invalid_argument("sweep: ratios must be > 0");
        }
        for (double a : alphas) {
            if (!(a > 0.0)) throw std::invalid_argument("sweep: alphas must be > 0");
        }
    }
};

struct RunRequest {
    Subcommand subcommand = Subcommand::SolveReference;
    std::string config_path;
    std::string output_dir;
    std::vector<std::pair<std::string, std::string>> overrides;
    std::optional<int> n_p;                  // --np, wins over config and --set
    std::optional<std::uint64_t> rng_seed;   // --seed, likewise
    SweepSpec sweep;
};

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> messages;
};

/// First grid time after which the control stays at (effectively) full
/// power through the end of the horizon; empty if it never does.
inline std::optional<double> empirical_full_power_onset(const ControlProfile& u,
                                                        double threshold = 0.99) {
    const auto& vals = u.values();
    std::size_t first = vals.size();
    for (std::size_t k = vals.size(); k-- > 0;) {
        if (vals[k] >= threshold) {
            first = k;
        } else {
            break;
        }
    }
    if (first == vals.size()) return std::nullopt;
    return u.breakpoints()[first];
}

namespace run_detail {

inline std::string describe(const Solution& sol, const char* kind) {
    std::ostringstream os;
    os << kind << ": objective=" << format_number(sol.objective)
       << " feasible=" << (sol.diagnostics.converged ? "yes" : "no")
       << " worst_violation=" << format_number(sol.constraints.worst_violation);
    if (sol.economics.nnp) os << " nnp=" << format_number(*sol.economics.nnp);
    return os.str();
}

inline std::string describe_infeasible(const infeasibility_error& e) {
    const ConstraintReport& c = e.best_attempt().constraints;
    std::ostringstream os;
    os << e.what() << " [state_loss=" << format_number(c.state_loss);
    if (c.delivery_loss) os << " delivery_loss=" << format_number(*c.delivery_loss);
    if (c.financial_value) os << " financial=" << format_number(*c.financial_value);
    os << " worst_violation=" << format_number(c.worst_violation) << "]";
    return os.str();
}

inline SummaryRow summary_row(const Solution& sol, const char* kind, const Scenario& s) {
    SummaryRow row;
    row.kind = kind;
    row.ratio = s.econ.benefit_cost_ratio();
    row.objective = sol.objective;
    row.nnp = sol.economics.nnp;
    row.feasible = sol.diagnostics.converged;
    row.t2_analytic = landmark_t2(s);
    row.t2_empirical = empirical_full_power_onset(sol.control);
    return row;
}

struct SolveStep {
    Solution solution;
    bool feasible = false;
};

// Runs one solve, converting an infeasibility error into a reported
// best-attempt row instead of aborting the whole request.
inline SolveStep solve_step(const AssembledProblem& prob, const SolverConfig& cfg,
                            RunResult& result, const char* kind) {
    SolveStep step;
    try {
        step.solution = solve(prob, cfg);
        step.feasible = step.solution.diagnostics.converged;
        result.messages.push_back(describe(step.solution, kind));
    } catch (const infeasibility_error& e) {
        step.solution = e.best_attempt();
        step.feasible = false;
        result.messages.push_back(describe_infeasible(e));
    }
    if (!step.feasible) result.exit_code = 1;
    return step;
}

}  // namespace run_detail

// Executes a run request end to end: load + validate the configuration,
// solve the requested problem chain, and write trajectory.csv, control.csv
// and summary.csv into the output directory. Exit code 0 only if every
// solve converged to an exactly feasible point.
inline RunResult run(const RunRequest& request) {
    namespace fs = std::filesystem;
    using namespace run_detail;
    RunResult result;

    LoadedConfig cfg = load_config(request.config_path, request.overrides);
    if (request.n_p) cfg.solver.n_p = *request.n_p;
    if (request.rng_seed) cfg.solver.rng_seed = *request.rng_seed;
    cfg.solver.validate();

    fs::create_directories(request.output_dir);
    const auto path_in = [&](const std::string& name, const std::string& sub = "") {
        fs::path p = fs::path(request.output_dir);
        if (!sub.empty()) {
            p /= sub;
            fs::create_directories(p);
        }
        return (p / name).string();
    };

    const Scenario& s = cfg.scenario;
    std::vector<SummaryRow> rows;

    const auto solve_reference_for = [&](const Scenario& sc) {
        return solve_step(build_reference(sc, cfg.solver.n_p, cfg.solver.sub_samples),
                          cfg.solver, result, "reference");
    };

    switch (request.subcommand) {
        case Subcommand::SolveReference: {
            const SolveStep ref = solve_reference_for(s);
            rows.push_back(summary_row(ref.solution, "reference", s));
            write_trajectory_csv(path_in("trajectory.csv"), ref.solution.trajectory);
            write_control_csv(path_in("control.csv"), ref.solution.control, nullptr,
                              nullptr, nullptr);
            break;
        }
        case Subcommand::SolveCapacity: {
            const SolveStep ref = solve_reference_for(s);
            rows.push_back(summary_row(ref.solution, "reference", s));
            const SolveStep alt = solve_step(
                build_capacity(s, ref.solution.control, cfg.solver.n_p, cfg.solver.sub_samples),
                cfg.solver, result, "capacity");
            rows.push_back(summary_row(alt.solution, "capacity", s));
            const StepFunction cap =
                capacity_profile(alt.solution.control, ref.solution.control);
            if (!has_total_decremental_reserve(cap)) {
                result.messages.push_back(
                    "capacity: integral of u_cap is negative; no total decremental reserve");
            }
            write_trajectory_csv(path_in("trajectory.csv"), alt.solution.trajectory);
            write_control_csv(path_in("control.csv"), alt.solution.control,
                              &ref.solution.control, nullptr, &cap);
            break;
        }
        case Subcommand::SolveDelivery: {
            const SolveStep ref = solve_reference_for(s);
            rows.push_back(summary_row(ref.solution, "reference", s));
            const AssembledProblem prob =
                build_delivery(s, ref.solution.control, cfg.instructions, cfg.solver.n_p,
                               cfg.solver.sub_samples);
            const SolveStep del = solve_step(prob, cfg.solver, result, "delivery");
            rows.push_back(summary_row(del.solution, "delivery", s));
            write_trajectory_csv(path_in("trajectory.csv"), del.solution.trajectory);
            write_control_csv(path_in("control.csv"), del.solution.control,
                              &ref.solution.control,
                              prob.instructed_minimum() ? &*prob.instructed_minimum() : nullptr,
                              nullptr);
            break;
        }
        case Subcommand::Sweep: {
            request.sweep.validate();
            const SolveStep ref = solve_reference_for(s);
            rows.push_back(summary_row(ref.solution, "reference", s));
            write_trajectory_csv(path_in("trajectory.csv"), ref.solution.trajectory);
            write_control_csv(path_in("control.csv"), ref.solution.control, nullptr,
                              nullptr, nullptr);
            std::vector<double> alphas = request.sweep.alphas;
            if (alphas.empty()) alphas.push_back(s.alpha_alt);
            for (double ratio : request.sweep.ratios) {
                for (double alpha : alphas) {
                    Scenario sc = s;
                    sc.econ.R = ratio * sc.econ.P;
                    sc.alpha_alt = alpha;
                    std::string sub = "ratio_" + format_number(ratio);
                    if (!request.sweep.alphas.empty()) {
                        sub += "_alpha_" + format_number(alpha);
                    }
                    const SolveStep alt = solve_step(
                        build_capacity(sc, ref.solution.control, cfg.solver.n_p,
                                       cfg.solver.sub_samples),
                        cfg.solver, result, sub.c_str());
                    rows.push_back(summary_row(alt.solution, "capacity", sc));
                    const StepFunction cap =
                        capacity_profile(alt.solution.control, ref.solution.control);
                    write_trajectory_csv(path_in("trajectory.csv", sub),
                                         alt.solution.trajectory);
                    write_control_csv(path_in("control.csv", sub), alt.solution.control,
                                      &ref.solution.control, nullptr, &cap);
                }
            }
            break;
        }
    }

    write_summary_csv(path_in("summary.csv"), rows);
    return result;
}

}  // namespace reserveopt
