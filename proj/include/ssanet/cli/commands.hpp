#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ssanet/benchmarks.hpp"
#include "ssanet/cli/config.hpp"
#include "ssanet/cli/documents.hpp"
#include "ssanet/pipeline/feature_select.hpp"
#include "ssanet/pipeline/train.hpp"

namespace ssanet::cli {

// File names inside the output directory.
inline constexpr const char* dataset_file = "dataset.csv";
inline constexpr const char* params_file = "params.txt";
inline constexpr const char* results_file = "results.json";
inline constexpr const char* metrics_file = "metrics.json";
inline constexpr const char* history_file = "history.csv";
inline constexpr const char* report_file = "report.csv";

struct RuntimeOptions {
    std::size_t threads = 1;
    std::ostream* log = &std::cerr;  // per-iteration lines; null silences
};

namespace detail {

inline std::string out_path(const RunConfig& cfg, const char* name) {
    return (std::filesystem::path(cfg.out) / name).string();
}

inline void ensure_out(const RunConfig& cfg) { std::filesystem::create_directories(cfg.out); }

inline std::function<void(const SparrowPopulation&)> iteration_logger(const RuntimeOptions& rt, const char* tag) {
    if (!rt.log) return {};
    std::ostream* os = rt.log;
    return [os, tag](const SparrowPopulation& p) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "[%s] iter %zu best %.9g\n", tag, p.iteration, p.best_fitness);
        *os << buf;
    };
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline void write_history_csv(const std::string& path, std::span<const double> history) {
    std::ostringstream os;
    os << "iteration,best_fitness\n";
    char buf[48];
    for (std::size_t t = 0; t < history.size(); ++t) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", t, history[t]);
        os << buf;
    }
    write_text(path, os.str());
}

}  // namespace detail

/// Data as the network sees it: loaded CSV, split, train-fit z-score, and
/// the pixel mask (all ones when feature selection is off).
struct PreparedData {
    Dataset data;
    Split split;
    std::vector<std::uint8_t> mask;
    std::vector<double> mask_history;
};

inline Dataset load_dataset(const RunConfig& cfg) {
    const std::string path = detail::out_path(cfg, dataset_file);
    if (!std::filesystem::exists(path)) throw MissingInputError("missing input file " + path + " (run generate first)");
    try {
        return load_csv(path, cfg.generator.height, cfg.generator.width);
    } catch (const ParseError& e) {
        throw ConsistencyError(path + ": " + e.what());
    } catch (const SchemaError& e) {
        throw ConsistencyError(path + ": " + e.what());
    }
}

/// With `mask` given it is applied as is; otherwise it is searched for
/// (pipeline.feature_select) or left all ones.
inline PreparedData prepare(const RunConfig& cfg, const Dataset& raw, const std::vector<std::uint8_t>* mask = nullptr) {
    PreparedData p;
    p.split = split_indices(raw.size(), cfg.split);
    p.data = normalize(raw, p.split.train).first;
    const std::size_t px = cfg.generator.height * cfg.generator.width;
    if (mask) {
        if (mask->size() != px) throw ConsistencyError("stored feature mask does not match the frame size");
        p.mask = *mask;
    } else if (cfg.feature_select) {
        auto fs = feature_select_ssa(p.data, p.split, cfg.feature_config());
        p.mask = std::move(fs.mask);
        p.mask_history = std::move(fs.history);
    } else {
        p.mask.assign(px, 1);
    }
    p.data = apply_mask(p.data, p.mask);
    return p;
}

inline Json cmd_optimize(const RunConfig& cfg, const RuntimeOptions& rt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Objective f = bench::make(cfg.objective, cfg.objective_dim);
    SsaConfig s = cfg.train.ssa;
    s.lower = f.lower;
    s.upper = f.upper;
    s.threads = rt.threads;
    const SsaResult r = ssa_optimize(f, s, detail::iteration_logger(rt, "optimize"));

    Json doc = document_base("optimize", cfg);
    doc["history"] = r.history;
    doc["metrics"] = {{"best_fitness", r.best_fitness}};
    doc["best_position"] = r.best_position;
    doc["wall_clock_seconds"] = detail::seconds_since(t0);
    detail::ensure_out(cfg);
    write_json(detail::out_path(cfg, results_file), doc);
    detail::write_history_csv(detail::out_path(cfg, history_file), r.history);
    return doc;
}

inline void cmd_generate(const RunConfig& cfg) {
    detail::ensure_out(cfg);
    write_csv(detail::out_path(cfg, dataset_file), generate_synthetic(cfg.generator));
}

inline Json cmd_train(const RunConfig& cfg, const RuntimeOptions& rt) {
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset raw = load_dataset(cfg);
    RunConfig run = cfg;
    run.train.ssa.threads = rt.threads;
    const PreparedData p = prepare(run, raw);

    const TrainResult tr = train_with_ssa(p.data, p.split, run.train, detail::iteration_logger(rt, "train"));
    TrainConfig base_cfg = run.train;
    base_cfg.ssa.iter_max = 0;
    const TrainResult base = train_with_ssa(p.data, p.split, base_cfg);

    const ParamCodec codec(run.train.network);
    Json doc = document_base("train", cfg);
    doc["history"] = tr.history;
    doc["metrics"] = metrics_json(tr.test);
    doc["roc"] = roc_json(tr.test);
    doc["training"] = {{"validation_auc", tr.validation_auc},
                       {"head_bias_shift", tr.head_bias_shift},
                       {"ssa_dim", tr.ssa_dim},
                       {"param_count", codec.total_count()},
                       {"layout_hash", codec.layout_hash()},
                       {"baseline_test_auc", base.test.auc ? Json(*base.test.auc) : Json(nullptr)},
                       {"feature_mask", p.mask},
                       {"feature_history", p.mask_history},
                       {"split_sizes", {p.split.train.size(), p.split.validation.size(), p.split.test.size()}}};
    doc["wall_clock_seconds"] = detail::seconds_since(t0);

    write_params(detail::out_path(cfg, params_file), codec.layout_hash(), tr.params);
    write_json(detail::out_path(cfg, results_file), doc);
    detail::write_history_csv(detail::out_path(cfg, history_file), tr.history);
    return doc;
}

/// Replays the test split with the stored parameters and mask.
inline Json cmd_evaluate(const RunConfig& cfg, const Json& train_doc) {
    const auto t0 = std::chrono::steady_clock::now();
    const ParamCodec codec(cfg.train.network);
    const ParamsFile pf = read_params(detail::out_path(cfg, params_file));
    if (pf.layout_hash != codec.layout_hash())
        throw ConsistencyError("params layout hash " + pf.layout_hash + " does not match the configured network (" +
                               codec.layout_hash() + ")");
    if (pf.values.size() != codec.total_count())
        throw ConsistencyError("params file holds " + std::to_string(pf.values.size()) + " values, network needs " +
                               std::to_string(codec.total_count()));

    std::vector<std::uint8_t> mask;
    try {
        mask = train_doc.at("training").at("feature_mask").get<std::vector<std::uint8_t>>();
    } catch (const Json::exception&) {
        throw ConsistencyError("results document has no training.feature_mask");
    }
    const Dataset raw = load_dataset(cfg);
    const PreparedData p = prepare(cfg, raw, &mask);
    const MetricsReport rep = evaluate(codec.unflatten(pf.values), subset(p.data, p.split.test));

    Json doc = document_base("evaluate", cfg);
    doc["metrics"] = metrics_json(rep);
    doc["roc"] = roc_json(rep);
    doc["wall_clock_seconds"] = detail::seconds_since(t0);
    write_json(detail::out_path(cfg, metrics_file), doc);
    return doc;
}

/// One row per results document: run, MAE, MAPE, RMSE, MSE, Accuracy, AUC.
/// Returns {csv, plain-text table}.
inline std::pair<std::string, std::string> cmd_report(const std::vector<std::string>& paths) {
    struct Row {
        std::string cells[7];
    };
    std::vector<Row> rows;
    rows.push_back({{"run", "MAE", "MAPE", "RMSE", "MSE", "Accuracy", "AUC"}});
    auto num = [](const Json& m, const char* key) -> std::string {
        if (!m.contains(key) || m.at(key).is_null()) return "NA";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6f", m.at(key).get<double>());
        return buf;
    };
    for (const auto& path : paths) {
        const Json doc = read_json(path);
        if (!doc.contains("metrics") || !doc.at("metrics").contains("accuracy"))
            throw ConsistencyError(path + ": not a train or evaluate results document");
        const Json& m = doc.at("metrics");
        rows.push_back({{path, num(m, "mae"), num(m, "mape"), num(m, "rmse"), num(m, "mse"), num(m, "accuracy"),
                         num(m, "auc")}});
    }
    std::ostringstream csv, table;
    std::size_t width[7] = {};
    for (const auto& r : rows)
        for (int c = 0; c < 7; ++c) width[c] = std::max(width[c], r.cells[c].size());
    for (const auto& r : rows) {
        for (int c = 0; c < 7; ++c) {
            csv << (c ? "," : "") << r.cells[c];
            table << (c ? "  " : "") << r.cells[c] << std::string(c < 6 ? width[c] - r.cells[c].size() : 0, ' ');
        }
        csv << "\n";
        table << "\n";
    }
    return {csv.str(), table.str()};
}

}  // namespace ssanet::cli
