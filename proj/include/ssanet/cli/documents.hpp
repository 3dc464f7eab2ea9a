#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssanet/cli/config.hpp"
#include "ssanet/pipeline/evaluate.hpp"

namespace ssanet::cli {

inline constexpr const char* artifact_version = "1.0.0";

/// A prerequisite file is absent (exit 3).
class MissingInputError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Artifacts on disk disagree with each other or with the config (exit 4).
class ConsistencyError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Json = nlohmann::json;  // std::map-backed, so keys serialise sorted

inline Json config_json(const RunConfig& cfg) {
    Json j = Json::object();
    for (const auto& [k, v] : config_echo(cfg)) j[k] = v;
    return j;
}

inline RunConfig config_from_json(const Json& j) {
    RunConfig cfg;
    for (const auto& [k, v] : j.items()) set_key(cfg, k, v.get<std::string>());
    return cfg;
}

inline Json errors_json(const RegressionErrors& e) {
    Json j;
    j["mae"] = e.mae;
    j["mse"] = e.mse;
    j["rmse"] = e.rmse;
    j["mape"] = e.mape_percent ? Json(*e.mape_percent) : Json(nullptr);
    j["mape_excluded"] = e.mape_excluded;
    return j;
}

/// Flat headline metrics (regression terms are score vs. label) plus the
/// full breakdown.
inline Json metrics_json(const MetricsReport& r) {
    Json j = errors_json(r.vs_label);
    j["n"] = r.n;
    j["threshold"] = r.threshold;
    j["accuracy"] = r.accuracy;
    j["auc_defined"] = r.auc_defined;
    j["auc"] = r.auc ? Json(*r.auc) : Json(nullptr);
    j["confusion"] = {{"tp", r.confusion.tp}, {"tn", r.confusion.tn}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}};
    j["vs_magnitude"] = errors_json(r.vs_magnitude);
    return j;
}

inline Json roc_json(const MetricsReport& r) {
    Json a = Json::array();
    for (const auto& p : r.roc) a.push_back({{"fpr", p.fpr}, {"tpr", p.tpr}});
    return a;
}

inline Json document_base(const std::string& command, const RunConfig& cfg) {
    Json j;
    j["artifact_version"] = artifact_version;
    j["command"] = command;
    j["seed"] = cfg.seed;
    j["config"] = config_json(cfg);
    return j;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << text;
}

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline Json read_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MissingInputError("missing input file " + path);
    try {
        return Json::parse(is);
    } catch (const Json::exception& e) {
        throw ConsistencyError(path + ": not a valid results document (" + e.what() + ")");
    }
}

// Parameter file:
//   # ssanet parameters
//   layout_hash <16 hex digits>
//   count <n>
// followed by n lines, one value each, printed with 17 significant digits.

inline void write_params(const std::string& path, const std::string& layout_hash, std::span<const double> v) {
    std::ostringstream os;
    os << "# ssanet parameters\nlayout_hash " << layout_hash << "\ncount " << v.size() << "\n";
    char buf[40];
    for (double x : v) {
        std::snprintf(buf, sizeof buf, "%.17g\n", x);
        os << buf;
    }
    write_text(path, os.str());
}

struct ParamsFile {
    std::string layout_hash;
    std::vector<double> values;
};

inline ParamsFile read_params(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw MissingInputError("missing input file " + path);
    auto bad = [&](const std::string& what) { return ConsistencyError(path + ": " + what); };
    std::string line;
    if (!std::getline(is, line) || line.rfind("#", 0) != 0) throw bad("missing '# ssanet parameters' header");
    ParamsFile pf;
    std::string tag;
    std::size_t count = 0;
    if (!std::getline(is, line) || !(std::istringstream(line) >> tag >> pf.layout_hash) || tag != "layout_hash")
        throw bad("missing layout_hash line");
    if (!std::getline(is, line) || !(std::istringstream(line) >> tag >> count) || tag != "count")
        throw bad("missing count line");
    pf.values.reserve(count);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        char* end = nullptr;
        const double v = std::strtod(line.c_str(), &end);
        if (end == line.c_str() || *end != '\0') throw bad("unparseable value '" + line + "'");
        pf.values.push_back(v);
    }
    if (pf.values.size() != count)
        throw bad("header declares " + std::to_string(count) + " values, file holds " +
                  std::to_string(pf.values.size()));
    return pf;
}

}  // namespace ssanet::cli
