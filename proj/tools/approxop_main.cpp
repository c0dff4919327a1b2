// approxop: command-line harness around the diagonal operator engines.
//
// Usage:
//   approxop <command> --config <path> [--n 1,2,4] [--seed N] [--out PATH]
//            [--format csv|json] [--samples N] [--budget N]
//            [--strategy auto|closed-form|rank|enumerate|monte-carlo]
//            [--family NAME] [--delta X]
//
// Commands: evaluate, converge, bounds, lipschitz, convexity, counterexample,
// family-check. The config document carries the function/point descriptors;
// flags override individual fields. APPROXOP_BUDGET overrides the enumeration
// budget (a --budget flag wins over the environment).
//
// Exit codes: 0 success, 2 spec error, 3 feasibility error, 4 property
// violation.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "approxop/errors.hpp"
#include "approxop/experiments.hpp"

namespace {

struct CliOverrides {
    std::string config_path;
    std::vector<int> n_list;
    std::uint64_t seed = 0;
    std::string out_path;
    std::string format;
    std::uint64_t samples = 0;
    std::uint64_t budget = 0;
    std::string strategy;
    std::string family;
    double delta = 0.0;
};

void add_common_options(CLI::App* sub, CliOverrides& o) {
    sub->add_option("--config", o.config_path, "JSON experiment config")->required();
    sub->add_option("--n", o.n_list, "override n_list")->delimiter(',');
    sub->add_option("--seed", o.seed, "override random seed");
    sub->add_option("--out", o.out_path, "output file (default stdout)");
    sub->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--samples", o.samples, "override Monte Carlo sample count");
    sub->add_option("--budget", o.budget, "override enumeration budget");
    sub->add_option("--strategy", o.strategy, "auto|closed-form|rank|enumerate|monte-carlo");
    sub->add_option("--family", o.family, "override kernel family");
    sub->add_option("--delta", o.delta, "fixed delta for the bounds command");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"infinite-dimensional Bernstein-type approximation operators"};
    app.require_subcommand(1);

    const std::vector<std::string> command_names = {
        "evaluate",  "converge",       "bounds",      "lipschitz",
        "convexity", "counterexample", "family-check"};
    CliOverrides overrides;
    std::vector<CLI::App*> subs;
    for (const std::string& name : command_names) {
        CLI::App* sub = app.add_subcommand(name, name + " experiment");
        add_common_options(sub, overrides);
        subs.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* active = nullptr;
        std::string command;
        for (std::size_t i = 0; i < subs.size(); ++i) {
            if (subs[i]->parsed()) {
                active = subs[i];
                command = command_names[i];
            }
        }

        std::ifstream in(overrides.config_path);
        if (!in) {
            std::cerr << "approxop: cannot open config " << overrides.config_path << "\n";
            return 2;
        }
        nlohmann::json config;
        try {
            in >> config;
        } catch (const nlohmann::json::exception& e) {
            std::cerr << "approxop: config parse error: " << e.what() << "\n";
            return 2;
        }

        approxop::ExperimentSpec spec = approxop::spec_from_json(config);
        spec.command = approxop::command_from_name(command);

        if (const char* env = std::getenv("APPROXOP_BUDGET"); env && *env)
            spec.budget = std::strtoull(env, nullptr, 10);
        if (active->count("--n")) spec.n_list = overrides.n_list;
        if (active->count("--seed")) spec.seed = overrides.seed;
        if (active->count("--out")) spec.out_path = overrides.out_path;
        if (active->count("--format"))
            spec.format = overrides.format == "json" ? approxop::OutputFormat::Json
                                                     : approxop::OutputFormat::Csv;
        if (active->count("--samples")) spec.samples = overrides.samples;
        if (active->count("--budget")) spec.budget = overrides.budget;
        if (active->count("--strategy"))
            spec.strategy = approxop::strategy_from_name(overrides.strategy);
        if (active->count("--family"))
            spec.family = approxop::family_from_name(overrides.family);
        if (active->count("--delta")) spec.fixed_delta = overrides.delta;

        const approxop::ExperimentResult result = approxop::run_experiment(spec);
        const std::string text = approxop::render(spec, result.table);
        if (spec.out_path) {
            std::ofstream out(*spec.out_path, std::ios::binary);
            if (!out) {
                std::cerr << "approxop: cannot write " << *spec.out_path << "\n";
                return 2;
            }
            out << text;
        } else {
            std::cout << text;
        }
        if (!result.message.empty()) std::cerr << "approxop: " << result.message << "\n";
        return result.violation ? 4 : 0;
    } catch (const approxop::FeasibilityError& e) {
        std::cerr << "approxop: " << e.what() << "\n";
        return 3;
    } catch (const approxop::StrategyError& e) {
        std::cerr << "approxop: " << e.what() << "\n";
        return 3;
    } catch (const approxop::EvaluationError& e) {
        std::cerr << "approxop: " << e.what() << "\n";
        return 3;
    } catch (const approxop::SpecError& e) {
        std::cerr << "approxop: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "approxop: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "approxop: internal error: " << e.what() << "\n";
        return 1;
    }
}
