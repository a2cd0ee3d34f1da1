#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reserveopt/profiles.hpp"
#include "reserveopt/thermal.hpp"

namespace reserveopt {

// CSV conventions: UTF-8, LF line endings, '.' decimal separator, headers
// always present, rows strictly time-ordered. Numbers are written with
// enough digits to round-trip doubles that matter at output precision.
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

inline std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps LF on every platform
    if (!out) {
        throw std::runtime_error("csv: cannot open \"" + path + "\" for writing");
    }
    return out;
}

inline void write_trajectory_csv(const std::string& path,
                                 const TemperatureTrajectory& traj) {
    std::ofstream out = open_csv(path);
    out << "t_min,x_degC\n";
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        out << format_number(traj.times[i]) << ',' << format_number(traj.temperatures[i])
            << '\n';
    }
}

// One row per breakpoint of the union partition; each value column holds the
// series value on the interval starting at that time (the final row repeats
// the last interval). Series not part of the run are left empty.
inline void write_control_csv(const std::string& path, const ControlProfile& u,
                              const ControlProfile* u_ref, const ControlProfile* u_ins,
                              const StepFunction* u_cap) {
    std::vector<double> bp = u.breakpoints();
    if (u_ref) bp = merge_breakpoints(bp, u_ref->breakpoints());
    if (u_ins) bp = merge_breakpoints(bp, u_ins->breakpoints());
    if (u_cap) bp = merge_breakpoints(bp, u_cap->breakpoints());

    std::ofstream out = open_csv(path);
    out << "t_min,u,u_ref,u_ins,u_cap\n";
    for (std::size_t i = 0; i < bp.size(); ++i) {
        // Sample each series just inside the interval that starts here.
        const double t = i + 1 < bp.size() ? 0.5 * (bp[i] + bp[i + 1])
                                           : 0.5 * (bp[i - 1] + bp[i]);
        out << format_number(bp[i]);
        out << ',' << format_number(u.value_at(t));
        out << ',';
        if (u_ref) out << format_number(u_ref->value_at(t));
        out << ',';
        if (u_ins) out << format_number(u_ins->value_at(t));
        out << ',';
        if (u_cap) out << format_number(u_cap->value_at(t));
        out << '\n';
    }
}

struct SummaryRow {
    std::string kind;
    double ratio = 0.0;
    double objective = 0.0;
    std::optional<double> nnp;
    bool feasible = false;
    double t2_analytic = 0.0;
    std::optional<double> t2_empirical;
};

inline void write_summary_csv(const std::string& path,
                              const std::vector<SummaryRow>& rows) {
    std::ofstream out = open_csv(path);
    out << "kind,ratio,objective,nnp,feasible,t2_analytic,t2_empirical\n";
    for (const auto& r : rows) {
        out << r.kind << ',' << format_number(r.ratio) << ',' << format_number(r.objective)
            << ',';
        if (r.nnp) out << format_number(*r.nnp);
        out << ',' << (r.feasible ? 1 : 0) << ',' << format_number(r.t2_analytic) << ',';
        if (r.t2_empirical) out << format_number(*r.t2_empirical);
        out << '\n';
    }
}

}  // namespace reserveopt
