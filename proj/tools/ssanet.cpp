// ssanet command-line driver: optimize, generate, train, evaluate, report.
//
// Exit codes: 0 ok, 1 unexpected failure, 2 config/usage error, 3 missing
// input, 4 artifact-consistency error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssanet/cli/commands.hpp"

namespace {

using namespace ssanet;
using namespace ssanet::cli;

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::size_t threads = 1;
    bool quiet = false;
    std::optional<std::string> objective;
    std::optional<std::size_t> dim;
    std::vector<std::string> report_inputs;
};

RunConfig base_config(const Flags& f) {
    if (f.config_path.empty()) return RunConfig{};
    if (!std::filesystem::exists(f.config_path)) throw MissingInputError("missing config file " + f.config_path);
    return parse_config_file(f.config_path);
}

void apply_overrides(RunConfig& cfg, const Flags& f) {
    if (f.seed) cfg.seed = *f.seed;
    if (f.out) cfg.out = *f.out;
    if (f.objective) cfg.objective = *f.objective;
    if (f.dim) cfg.objective_dim = *f.dim;
    cfg.propagate();
    cfg.validate();
}

int run(const std::string& command, const Flags& f) {
    RuntimeOptions rt;
    rt.threads = f.threads;
    if (f.quiet) rt.log = nullptr;

    if (command == "report") {
        RunConfig cfg = base_config(f);
        if (f.out) cfg.out = *f.out;
        const auto [csv, table] = cmd_report(f.report_inputs);
        std::filesystem::create_directories(cfg.out);
        write_text((std::filesystem::path(cfg.out) / report_file).string(), csv);
        std::cout << table;
        return 0;
    }
    if (command == "evaluate") {
        // Without --config the train run's embedded config is replayed.
        RunConfig probe = base_config(f);
        if (f.out) probe.out = *f.out;
        const Json train_doc = read_json((std::filesystem::path(probe.out) / results_file).string());
        RunConfig cfg = f.config_path.empty() ? config_from_json(train_doc.at("config")) : probe;
        cfg.out = probe.out;
        apply_overrides(cfg, f);
        const Json doc = cmd_evaluate(cfg, train_doc);
        std::cout << "evaluate: accuracy " << doc["metrics"]["accuracy"] << " auc " << doc["metrics"]["auc"] << "\n";
        return 0;
    }

    RunConfig cfg = base_config(f);
    apply_overrides(cfg, f);
    if (command == "optimize") {
        const Json doc = cmd_optimize(cfg, rt);
        std::cout << "optimize " << cfg.objective << " d=" << cfg.objective_dim << ": best "
                  << doc["metrics"]["best_fitness"] << "\n";
    } else if (command == "generate") {
        cmd_generate(cfg);
        std::cout << "generate: wrote " << (std::filesystem::path(cfg.out) / dataset_file).string() << "\n";
    } else if (command == "train") {
        const Json doc = cmd_train(cfg, rt);
        std::cout << "train: test accuracy " << doc["metrics"]["accuracy"] << " auc " << doc["metrics"]["auc"]
                  << " (untrained baseline auc " << doc["training"]["baseline_test_auc"] << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SSA-trained residual CNN + BiGRU anomaly detector"};
    app.require_subcommand(0, 1);
    Flags f;
    bool reference = false;
    app.add_option("--config", f.config_path, "run configuration file (section.key = value lines)");
    app.add_option("--seed", f.seed, "master seed, overrides run.seed");
    app.add_option("--out", f.out, "output directory, overrides run.out");
    app.add_option("--threads", f.threads, "fitness evaluation threads; results do not depend on it")
        ->check(CLI::PositiveNumber);
    app.add_flag("--quiet", f.quiet, "suppress per-iteration log lines");
    app.add_flag("--config-reference", reference, "print every config key with its default and exit");

    auto* opt = app.add_subcommand("optimize", "run SSA on a benchmark function");
    opt->add_option("--objective", f.objective, "sphere, rastrigin or rosenbrock");
    opt->add_option("--dim", f.dim, "problem dimension");
    app.add_subcommand("generate", "write the synthetic dataset CSV");
    app.add_subcommand("train", "train the network with SSA on the generated dataset");
    app.add_subcommand("evaluate", "re-score the test split from saved parameters");
    auto* rep = app.add_subcommand("report", "comparison table over results documents");
    rep->add_option("inputs", f.report_inputs, "results or metrics JSON files")->required();
    for (const char* name : {"optimize", "generate", "train", "evaluate", "report"})
        app.get_subcommand(name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (reference) {
        std::cout << config_reference();
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }

    try {
        return run(app.get_subcommands().front()->get_name(), f);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const LookupError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const MissingInputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConsistencyError& e) {
        std::cerr << "consistency error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
