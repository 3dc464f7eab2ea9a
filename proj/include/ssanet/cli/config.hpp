#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ssanet/pipeline/dataset.hpp"
#include "ssanet/pipeline/feature_select.hpp"
#include "ssanet/pipeline/preprocess.hpp"
#include "ssanet/pipeline/train.hpp"

namespace ssanet::cli {

// Run configuration file: one `section.key = value` per line, `#` starts a
// comment line, blank lines ignored. Unknown or repeated keys are errors.

struct RunConfig {
    std::uint64_t seed = 0;
    std::string out = "out";

    GeneratorConfig generator;
    SplitSpec split;
    TrainConfig train;

    bool feature_select = false;
    double feature_lambda = 0.05;
    std::size_t feature_pop_size = 30;
    std::size_t feature_iter_max = 100;

    std::string objective = "sphere";
    std::size_t objective_dim = 10;

    RunConfig() { train.ssa.iter_max = 300; }

    /// Pushes run.seed and the generator frame size into every component.
    void propagate() {
        generator.seed = seed;
        split.seed = seed;
        train.ssa.seed = seed;
        train.init_seed = seed;
        train.network.frame_h = generator.height;
        train.network.frame_w = generator.width;
        train.network.channels = 1;
    }

    FeatureSelectConfig feature_config() const {
        FeatureSelectConfig f;
        f.ssa = train.ssa;
        f.ssa.pop_size = feature_pop_size;
        f.ssa.iter_max = feature_iter_max;
        f.ssa.seed = child_seed(seed, 4);
        f.lambda = feature_lambda;
        return f;
    }

    void validate() const {
        generator.validate();
        split.validate();
        train.network.validate();
        if (!(train.weight_bound > 0.0)) throw ConfigError("network.weight_bound must be > 0");
        SsaConfig probe = train.ssa;
        probe.lower = {0.0};
        probe.upper = {1.0};
        probe.validate();
        if (!(feature_lambda >= 0.0)) throw ConfigError("pipeline.feature_lambda must be >= 0");
        if (feature_pop_size < 2) throw ConfigError("pipeline.feature_pop_size must be >= 2");
        if (objective_dim == 0) throw ConfigError("optimize.dim must be >= 1");
    }
};

namespace detail {

inline std::string fmt(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_num(const std::string& key, const std::string& v) {
    T out{};
    const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
    if (r.ec != std::errc{} || r.ptr != v.data() + v.size())
        throw ConfigError("config key " + key + ": cannot parse '" + v + "'");
    return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key " + key + ": expected true/false, got '" + v + "'");
}

}  // namespace detail

struct ConfigKey {
    std::string name;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

/// Every accepted key in echo order.
inline const std::vector<ConfigKey>& config_keys() {
    using detail::fmt;
    using detail::parse_bool;
    using detail::parse_num;
    using sz = std::size_t;
    auto size_key = [](std::string name, std::string help, sz RunConfig::*outer) {
        return ConfigKey{name, std::move(help),
                         [name, outer](RunConfig& c, const std::string& v) { c.*outer = parse_num<sz>(name, v); },
                         [outer](const RunConfig& c) { return std::to_string(c.*outer); }};
    };
#define SSANET_KEY(NAME, HELP, TYPE, EXPR)                                                                   \
    ConfigKey {                                                                                              \
        NAME, HELP, [](RunConfig& c, const std::string& v) { c.EXPR = parse_num<TYPE>(NAME, v); },           \
            [](const RunConfig& c) -> std::string {                                                          \
                if constexpr (std::is_floating_point_v<TYPE>) return fmt(c.EXPR);                            \
                else return std::to_string(c.EXPR);                                                          \
            }                                                                                                \
    }
#define SSANET_BOOL(NAME, HELP, EXPR)                                                                        \
    ConfigKey {                                                                                              \
        NAME, HELP, [](RunConfig& c, const std::string& v) { c.EXPR = parse_bool(NAME, v); },                \
            [](const RunConfig& c) -> std::string { return c.EXPR ? "true" : "false"; }                      \
    }
    static const std::vector<ConfigKey> keys{
        SSANET_KEY("run.seed", "master seed for every stochastic component", std::uint64_t, seed),
        ConfigKey{"run.out", "output directory", [](RunConfig& c, const std::string& v) { c.out = v; },
                  [](const RunConfig& c) { return c.out; }},
        SSANET_KEY("generator.n_samples", "number of sequences", sz, generator.n_samples),
        SSANET_KEY("generator.frames", "frames per sequence (T)", sz, generator.frames),
        SSANET_KEY("generator.height", "frame height in pixels", sz, generator.height),
        SSANET_KEY("generator.width", "frame width in pixels", sz, generator.width),
        SSANET_KEY("generator.anomaly_rate", "fraction of anomalous sequences, [0,1]", double, generator.anomaly_rate),
        SSANET_KEY("generator.noise_std", "pixel noise standard deviation", double, generator.noise_std),
        SSANET_KEY("split.train", "train fraction", double, split.train),
        SSANET_KEY("split.validation", "validation fraction (SSA objective)", double, split.validation),
        SSANET_KEY("split.test", "test fraction (reported metrics)", double, split.test),
        SSANET_KEY("ssa.pop_size", "sparrows per population", sz, train.ssa.pop_size),
        SSANET_KEY("ssa.iter_max", "SSA iterations", sz, train.ssa.iter_max),
        SSANET_KEY("ssa.safety_threshold", "ST, in (0.5, 1)", double, train.ssa.safety_threshold),
        SSANET_KEY("ssa.producer_fraction", "fraction of producers", double, train.ssa.producer_fraction),
        SSANET_KEY("ssa.alerter_fraction", "fraction of alerters, [0.1, 0.3]", double, train.ssa.alerter_fraction),
        SSANET_KEY("network.stem_kernel", "stem conv kernel size", sz, train.network.stem_kernel),
        SSANET_KEY("network.stem_channels", "stem conv output channels", sz, train.network.stem_channels),
        SSANET_KEY("network.pool_window", "max-pool window", sz, train.network.pool_window),
        SSANET_KEY("network.pool_stride", "max-pool stride", sz, train.network.pool_stride),
        SSANET_KEY("network.block_kernel", "residual branch kernel size", sz, train.network.block_kernel),
        SSANET_KEY("network.branch_depth", "convs per residual branch", sz, train.network.branch_depth),
        ConfigKey{"network.block_channels", "comma-separated output channels, one per residual block",
                  [](RunConfig& c, const std::string& v) {
                      std::vector<sz> ch;
                      std::stringstream ss(v);
                      std::string item;
                      while (std::getline(ss, item, ','))
                          ch.push_back(parse_num<sz>("network.block_channels", detail::trim(item)));
                      c.train.network.block_channels = std::move(ch);
                  },
                  [](const RunConfig& c) {
                      std::string s;
                      for (auto v : c.train.network.block_channels) s += (s.empty() ? "" : ",") + std::to_string(v);
                      return s;
                  }},
        SSANET_KEY("network.gru_hidden", "BiGRU hidden size per direction", sz, train.network.gru_hidden),
        SSANET_BOOL("network.freeze_extractor", "keep conv extractor at its seeded init", train.freeze_extractor),
        SSANET_KEY("network.weight_bound", "SSA search box [-b, b] per weight", double, train.weight_bound),
        SSANET_BOOL("network.calibrate_threshold", "shift head bias so 0.5 is the best validation cut",
                    train.calibrate_threshold),
        SSANET_BOOL("pipeline.feature_select", "run SSA pixel-mask selection before training", feature_select),
        SSANET_KEY("pipeline.feature_lambda", "mask size penalty", double, feature_lambda),
        size_key("pipeline.feature_pop_size", "sparrows for mask search", &RunConfig::feature_pop_size),
        size_key("pipeline.feature_iter_max", "iterations for mask search", &RunConfig::feature_iter_max),
        ConfigKey{"optimize.objective", "benchmark for the optimize command",
                  [](RunConfig& c, const std::string& v) { c.objective = v; },
                  [](const RunConfig& c) { return c.objective; }},
        size_key("optimize.dim", "benchmark dimension", &RunConfig::objective_dim),
    };
#undef SSANET_KEY
#undef SSANET_BOOL
    return keys;
}

inline void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& k : config_keys())
        if (k.name == key) {
            k.set(cfg, value);
            return;
        }
    throw ConfigError("unknown config key '" + key + "'");
}

inline RunConfig parse_config(std::istream& is) {
    RunConfig cfg;
    std::map<std::string, std::size_t> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'section.key = value'");
        const std::string key = detail::trim(t.substr(0, eq)), value = detail::trim(t.substr(eq + 1));
        if (!seen.emplace(key, lineno).second)
            throw ConfigError("config line " + std::to_string(lineno) + ": key '" + key + "' repeated");
        try {
            set_key(cfg, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("config line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    return parse_config(is);
}

/// Effective configuration as ordered key -> value text; feeding these back
/// through set_key reproduces the config.
inline std::vector<std::pair<std::string, std::string>> config_echo(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& k : config_keys()) out.emplace_back(k.name, k.get(cfg));
    return out;
}

/// Commented reference of every key with its default.
inline std::string config_reference() {
    const RunConfig def;
    std::ostringstream os;
    os << "# ssanet run configuration reference (defaults shown)\n";
    for (const auto& k : config_keys()) os << "# " << k.help << "\n" << k.name << " = " << k.get(def) << "\n";
    return os.str();
}

}  // namespace ssanet::cli
