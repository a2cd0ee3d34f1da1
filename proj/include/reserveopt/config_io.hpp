#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "reserveopt/profiles.hpp"
#include "reserveopt/scenario.hpp"
#include "reserveopt/solver.hpp"

namespace reserveopt {

// A fully parsed run configuration: the scenario itself, any reserve
// instructions, and the solver settings.
struct LoadedConfig {
    Scenario scenario;
    InstructionSequence instructions;
    SolverConfig solver;
};

namespace config_detail {

using nlohmann::json;

inline double require_number(const json& section, const std::string& section_name,
                             const std::string& key) {
    if (!section.contains(key)) {
        throw std::invalid_argument("config: missing key \"" + section_name + "." + key + "\"");
    }
    const json& v = section.at(key);
    if (!v.is_number()) {
        throw std::invalid_argument("config: key \"" + section_name + "." + key +
                                    "\" must be a number");
    }
    return v.get<double>();
}

inline double number_or(const json& section, const std::string& section_name,
                        const std::string& key, double fallback) {
    if (!section.contains(key)) return fallback;
    return require_number(section, section_name, key);
}

inline void reject_unknown(const json& section, const std::string& section_name,
                           const std::set<std::string>& allowed) {
    for (const auto& item : section.items()) {
        if (!allowed.count(item.key())) {
            throw std::invalid_argument("config: unknown key \"" + section_name + "." +
                                        item.key() + "\"");
        }
    }
}

inline const json& require_section(const json& doc, const std::string& name) {
    if (!doc.contains(name)) {
        throw std::invalid_argument("config: missing section \"" + name + "\"");
    }
    if (!doc.at(name).is_object()) {
        throw std::invalid_argument("config: section \"" + name + "\" must be an object");
    }
    return doc.at(name);
}

// Section membership for bare override keys, e.g. "X_hat" -> "comfort.X_hat".
inline const std::map<std::string, std::string>& bare_key_sections() {
    static const std::map<std::string, std::string> m = {
        {"tau", "thermal"},         {"X_off", "thermal"},
        {"X_on", "thermal"},        {"C_max", "thermal"},
        {"T", "comfort"},           {"X_min", "comfort"},
        {"X_max", "comfort"},       {"X_hat", "comfort"},
        {"x0", "comfort"},          {"P", "economics"},
        {"R", "economics"},         {"gamma", "economics"},
        {"R_over_P", "economics"},  {"alpha_ref", "regularizers"},
        {"alpha_alt", "regularizers"}, {"alpha_del", "regularizers"},
        {"lambda_state", "loss"},   {"lambda_delivery", "loss"},
        {"epsilon_state", "loss"},  {"epsilon_delivery", "loss"},
        {"theta", "loss"},          {"np", "solver"},
        {"max_iterations", "solver"}, {"convergence_tol", "solver"},
        {"constraint_tol", "solver"}, {"multistart", "solver"},
        {"seed", "solver"},         {"sub_samples", "solver"},
    };
    return m;
}

}  // namespace config_detail

/// Applies a "key=value" override onto the raw config document. Keys may be
/// dotted ("economics.R") or bare ("X_hat"); "R_over_P" sets R from the
/// file's (or an earlier override's) price P.
inline void apply_override(nlohmann::json& doc, const std::string& key,
                           const std::string& value) {
    using nlohmann::json;
    std::string section, field = key;
    if (auto dot = key.find('.'); dot != std::string::npos) {
        section = key.substr(0, dot);
        field = key.substr(dot + 1);
    } else {
        const auto& m = config_detail::bare_key_sections();
        auto it = m.find(field);
        if (it == m.end()) {
            throw std::invalid_argument("config override: unknown key \"" + key + "\"");
        }
        section = it->second;
    }
    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // keep as string; struct parsing will reject if unsuitable
    }
    if (field == "R_over_P") {
        if (!parsed.is_number()) {
            throw std::invalid_argument("config override: R_over_P must be a number");
        }
        if (!doc.contains("economics") || !doc["economics"].contains("P")) {
            throw std::invalid_argument("config override: R_over_P requires economics.P");
        }
        doc["economics"]["R"] = doc["economics"]["P"].get<double>() * parsed.get<double>();
        return;
    }
    doc[section][field] = parsed;
}

/// Parses a raw config document into validated structures. Unknown keys are
/// rejected; loss, solver and instructions sections take documented defaults.
inline LoadedConfig parse_config(const nlohmann::json& doc) {
    using namespace config_detail;
    using nlohmann::json;

    reject_unknown(doc, "",
                   {"thermal", "comfort", "economics", "regularizers", "loss", "solver",
                    "instructions"});

    LoadedConfig out;
    Scenario& s = out.scenario;

    const json& thermal = require_section(doc, "thermal");
    reject_unknown(thermal, "thermal", {"tau", "X_off", "X_on", "C_max"});
    s.thermal.tau = require_number(thermal, "thermal", "tau");
    s.thermal.X_off = require_number(thermal, "thermal", "X_off");
    s.thermal.X_on = require_number(thermal, "thermal", "X_on");
    s.thermal.C_max = require_number(thermal, "thermal", "C_max");

    const json& comfort = require_section(doc, "comfort");
    reject_unknown(comfort, "comfort", {"T", "X_min", "X_max", "X_hat", "x0"});
    s.T = require_number(comfort, "comfort", "T");
    s.X_min = require_number(comfort, "comfort", "X_min");
    s.X_max = require_number(comfort, "comfort", "X_max");
    s.X_hat = require_number(comfort, "comfort", "X_hat");
    s.x0 = require_number(comfort, "comfort", "x0");

    const json& econ = require_section(doc, "economics");
    reject_unknown(econ, "economics", {"P", "R", "gamma"});
    s.econ.P = require_number(econ, "economics", "P");
    s.econ.R = require_number(econ, "economics", "R");
    s.econ.gamma = number_or(econ, "economics", "gamma", 0.0);

    const json& reg = require_section(doc, "regularizers");
    reject_unknown(reg, "regularizers", {"alpha_ref", "alpha_alt", "alpha_del"});
    s.alpha_ref = require_number(reg, "regularizers", "alpha_ref");
    s.alpha_alt = require_number(reg, "regularizers", "alpha_alt");
    s.alpha_del = require_number(reg, "regularizers", "alpha_del");

    s.loss = LossConfig{};
    s.loss.lambda_state = s.T;
    s.loss.lambda_delivery = s.T;
    if (doc.contains("loss")) {
        const json& loss = doc.at("loss");
        reject_unknown(loss, "loss",
                       {"lambda_state", "lambda_delivery", "epsilon_state",
                        "epsilon_delivery", "theta"});
        s.loss.lambda_state = number_or(loss, "loss", "lambda_state", s.loss.lambda_state);
        s.loss.lambda_delivery =
            number_or(loss, "loss", "lambda_delivery", s.loss.lambda_delivery);
        s.loss.epsilon_state = number_or(loss, "loss", "epsilon_state", s.loss.epsilon_state);
        s.loss.epsilon_delivery =
            number_or(loss, "loss", "epsilon_delivery", s.loss.epsilon_delivery);
        s.loss.theta = number_or(loss, "loss", "theta", s.loss.theta);
    }

    out.solver = SolverConfig{};
    if (doc.contains("solver")) {
        const json& sv = doc.at("solver");
        reject_unknown(sv, "solver",
                       {"np", "max_iterations", "convergence_tol", "constraint_tol",
                        "multistart", "seed", "sub_samples"});
        out.solver.n_p = static_cast<int>(number_or(sv, "solver", "np", out.solver.n_p));
        out.solver.max_iterations = static_cast<int>(
            number_or(sv, "solver", "max_iterations", out.solver.max_iterations));
        out.solver.convergence_tol =
            number_or(sv, "solver", "convergence_tol", out.solver.convergence_tol);
        out.solver.constraint_tol =
            number_or(sv, "solver", "constraint_tol", out.solver.constraint_tol);
        out.solver.multistart =
            static_cast<int>(number_or(sv, "solver", "multistart", out.solver.multistart));
        if (sv.contains("seed")) {
            if (!sv.at("seed").is_number_unsigned() && !sv.at("seed").is_number_integer()) {
                throw std::invalid_argument("config: key \"solver.seed\" must be an integer");
            }
            out.solver.rng_seed = sv.at("seed").get<std::uint64_t>();
        }
        out.solver.sub_samples =
            static_cast<int>(number_or(sv, "solver", "sub_samples", out.solver.sub_samples));
    }

    std::vector<Instruction> items;
    if (doc.contains("instructions")) {
        const json& arr = doc.at("instructions");
        if (!arr.is_array()) {
            throw std::invalid_argument("config: \"instructions\" must be an array");
        }
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& it = arr.at(i);
            const std::string tag = "instructions[" + std::to_string(i) + "]";
            reject_unknown(it, tag, {"u_ask", "C_ask", "start", "end"});
            Instruction ins{};
            if (it.contains("u_ask") == it.contains("C_ask")) {
                throw std::invalid_argument("config: " + tag +
                                            " needs exactly one of u_ask or C_ask");
            }
            if (it.contains("u_ask")) {
                ins.u_ask = require_number(it, tag, "u_ask");
            } else {
                ins.u_ask = normalize(require_number(it, tag, "C_ask"), s.thermal.C_max);
            }
            ins.start = require_number(it, tag, "start");
            ins.end = require_number(it, tag, "end");
            items.push_back(ins);
        }
    }

    s.validate();
    out.solver.validate();
    out.instructions = InstructionSequence(std::move(items), s.T);
    return out;
}

/// Config document equivalent to a loaded configuration; loading it back
/// yields identical values.
inline nlohmann::json config_to_json(const LoadedConfig& cfg) {
    using nlohmann::json;
    const Scenario& s = cfg.scenario;
    json doc;
    doc["thermal"] = {{"tau", s.thermal.tau},
                      {"X_off", s.thermal.X_off},
                      {"X_on", s.thermal.X_on},
                      {"C_max", s.thermal.C_max}};
    doc["comfort"] = {{"T", s.T},
                      {"X_min", s.X_min},
                      {"X_max", s.X_max},
                      {"X_hat", s.X_hat},
                      {"x0", s.x0}};
    doc["economics"] = {{"P", s.econ.P}, {"R", s.econ.R}, {"gamma", s.econ.gamma}};
    doc["regularizers"] = {{"alpha_ref", s.alpha_ref},
                           {"alpha_alt", s.alpha_alt},
                           {"alpha_del", s.alpha_del}};
    doc["loss"] = {{"lambda_state", s.loss.lambda_state},
                   {"lambda_delivery", s.loss.lambda_delivery},
                   {"epsilon_state", s.loss.epsilon_state},
                   {"epsilon_delivery", s.loss.epsilon_delivery},
                   {"theta", s.loss.theta}};
    doc["solver"] = {{"np", cfg.solver.n_p},
                     {"max_iterations", cfg.solver.max_iterations},
                     {"convergence_tol", cfg.solver.convergence_tol},
                     {"constraint_tol", cfg.solver.constraint_tol},
                     {"multistart", cfg.solver.multistart},
                     {"seed", cfg.solver.rng_seed},
                     {"sub_samples", cfg.solver.sub_samples}};
    doc["instructions"] = json::array();
    for (const auto& it : cfg.instructions.items()) {
        doc["instructions"].push_back(
            {{"u_ask", it.u_ask}, {"start", it.start}, {"end", it.end}});
    }
    return doc;
}

inline LoadedConfig load_config(const std::string& path,
                                const std::vector<std::pair<std::string, std::string>>&
                                    overrides = {}) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open \"" + path + "\"");
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config: parse error in \"" + path + "\": " + e.what());
    }
    for (const auto& [k, v] : overrides) {
        apply_override(doc, k, v);
    }
    return parse_config(doc);
}

/// Validated scenario from a config file; command-line overrides supersede
/// file values.
inline Scenario load_scenario(const std::string& path,
                              const std::vector<std::pair<std::string, std::string>>&
                                  overrides = {}) {
    return load_config(path, overrides).scenario;
}

}  // namespace reserveopt
