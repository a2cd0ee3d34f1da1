// reserve-opt: cost-optimal night-time cooling schedules for a building
// offering decremental replacement reserve. Subcommands solve the reference,
// capacity and delivery problems for a JSON scenario and write CSV results.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "reserveopt/run.hpp"

namespace {

std::vector<std::pair<std::string, std::string>> parse_overrides(
    const std::vector<std::string>& raw) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& kv : raw) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw CLI::ValidationError("--set expects key=value, got \"" + kv + "\"");
        }
        out.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal night-time cooling schedules for decremental reserve provision"};
    app.require_subcommand(1);

    std::string config_path;
    std::string output_dir;
    std::vector<std::string> set_args;
    int n_p = 0;
    std::uint64_t seed = 0;
    bool np_given = false;
    bool seed_given = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Scenario config file (JSON)")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", output_dir, "Output directory for CSV results")->required();
        sub->add_option("--set", set_args,
                        "Override a config value, e.g. --set X_hat=20 or --set economics.R=12.5");
        sub->add_option("--np", n_p, "Number of control intervals")
            ->check(CLI::PositiveNumber)
            ->each([&](const std::string&) { np_given = true; });
        sub->add_option("--seed", seed, "Seed for the multistart random draws")
            ->each([&](const std::string&) { seed_given = true; });
    };

    CLI::App* ref = app.add_subcommand("solve-reference", "Optimal reference profile");
    CLI::App* cap = app.add_subcommand(
        "solve-capacity", "Optimal alternative profile and reserve capacity");
    CLI::App* del = app.add_subcommand(
        "solve-delivery", "Optimal delivery profile for the configured instructions");
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Capacity solves over a list of benefit-cost ratios");
    add_common(ref);
    add_common(cap);
    add_common(del);
    add_common(sweep);

    std::vector<double> ratios{0.75, 1.0, 1.25};
    std::vector<double> alphas;
    sweep->add_option("--ratios", ratios, "Benefit-cost ratios R/P to sweep")
        ->delimiter(',');
    sweep->add_option("--alphas", alphas, "alpha_alt values to sweep (optional)")
        ->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    reserveopt::RunRequest request;
    if (ref->parsed()) request.subcommand = reserveopt::Subcommand::SolveReference;
    if (cap->parsed()) request.subcommand = reserveopt::Subcommand::SolveCapacity;
    if (del->parsed()) request.subcommand = reserveopt::Subcommand::SolveDelivery;
    if (sweep->parsed()) {
        request.subcommand = reserveopt::Subcommand::Sweep;
        request.sweep.ratios = ratios;
        request.sweep.alphas = alphas;
    }
    request.config_path = config_path;
    request.output_dir = output_dir;
    if (np_given) request.n_p = n_p;
    if (seed_given) request.rng_seed = seed;

    try {
        request.overrides = parse_overrides(set_args);
        const reserveopt::RunResult result = reserveopt::run(request);
        for (const auto& line : result.messages) {
            std::cout << line << '\n';
        }
        return result.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
