#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ssanet/neural/codec.hpp"
#include "ssanet/pipeline/evaluate.hpp"
#include "ssanet/pipeline/preprocess.hpp"
#include "ssanet/ssa.hpp"

namespace ssanet {

struct TrainConfig {
    NetworkConfig network;
    SsaConfig ssa;                // bounds are set from weight_bound and the codec
    bool freeze_extractor = true;  // stem and residual weights stay at their seeded init
    double weight_bound = 3.0;     // search box [-bound, bound] per weight
    std::uint64_t init_seed = 0;   // extractor initialisation
    bool calibrate_threshold = true;  // shift head bias after search so 0.5 is the best validation cut
};

/// Cut c on the logits maximising accuracy of the rule logit > c over the
/// given labels. Candidates are midpoints between consecutive distinct
/// logits plus one below the minimum and one above the maximum; ties go to
/// the smallest |c|, then the smaller c.
inline double best_logit_cut(std::span<const double> logits, std::span<const int> labels) {
    std::vector<double> sorted(logits.begin(), logits.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<double> cuts{sorted.front() - 1.0};
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) cuts.push_back(sorted[i] + (sorted[i + 1] - sorted[i]) / 2.0);
    cuts.push_back(sorted.back() + 1.0);
    double best_cut = 0.0;
    std::size_t best_hits = 0;
    bool first = true;
    for (double c : cuts) {
        std::size_t hits = 0;
        for (std::size_t i = 0; i < logits.size(); ++i) hits += (logits[i] > c) == (labels[i] == 1) ? 1 : 0;
        const bool better = hits > best_hits ||
                            (hits == best_hits && (std::abs(c) < std::abs(best_cut) ||
                                                   (std::abs(c) == std::abs(best_cut) && c < best_cut)));
        if (first || better) {
            best_cut = c;
            best_hits = hits;
            first = false;
        }
    }
    return best_cut;
}

struct TrainResult {
    std::vector<double> params;  // full codec-ordered vector, frozen prefix included
    std::vector<double> history;
    double validation_auc = 0.0;
    double head_bias_shift = 0.0;  // added to head.b by threshold calibration
    MetricsReport test;
    double seconds = 0.0;
    std::size_t ssa_dim = 0;
};

/// Fitness of a weight vector: 1 - AUC of the network scores on the
/// validation split. With a frozen extractor the per-frame features are
/// computed once and only the BiGRU and head are re-run per evaluation.
class WeightObjective {
  public:
    WeightObjective(const Dataset& data, std::span<const std::size_t> val_idx, const TrainConfig& cfg)
        : codec_(cfg.network), freeze_(cfg.freeze_extractor) {
        Network init = zero_network(cfg.network);
        init_extractor(init, cfg.init_seed);
        const Tensor flat = codec_.flatten(init);
        prefix_.assign(flat.data().begin(), flat.data().begin() + static_cast<std::ptrdiff_t>(codec_.extractor_count()));

        int pos = 0;
        for (auto i : val_idx) {
            const auto& s = data.at(i);
            labels_.push_back(s.label);
            pos += s.label;
            if (freeze_) features_.push_back(sequence_features(s.frames, init));
            else frames_.push_back(&s.frames);
        }
        if (pos == 0 || pos == static_cast<int>(labels_.size()))
            throw ConfigError("training objective needs both classes in the validation split");
    }

    const ParamCodec& codec() const noexcept { return codec_; }
    std::size_t dim() const noexcept { return codec_.trainable_count(freeze_); }

    /// Search vector -> full codec vector.
    std::vector<double> full_params(std::span<const double> v) const {
        if (v.size() != dim())
            throw ConfigError("search vector length " + std::to_string(v.size()) + " != trainable parameter count " +
                              std::to_string(dim()));
        std::vector<double> full;
        full.reserve(codec_.total_count());
        if (freeze_) full.insert(full.end(), prefix_.begin(), prefix_.end());
        full.insert(full.end(), v.begin(), v.end());
        return full;
    }

    std::vector<double> logits(std::span<const double> v) const {
        const Network net = codec_.unflatten(full_params(v));
        std::vector<double> out;
        out.reserve(labels_.size());
        if (freeze_)
            for (const auto& f : features_) out.push_back(logit_features(f, net));
        else
            for (const auto* fr : frames_) out.push_back(logit_features(sequence_features(*fr, net), net));
        return out;
    }

    const std::vector<int>& labels() const noexcept { return labels_; }

    std::vector<double> scores(std::span<const double> v) const {
        const Network net = codec_.unflatten(full_params(v));
        std::vector<double> out;
        out.reserve(labels_.size());
        if (freeze_)
            for (const auto& f : features_) out.push_back(score_features(f, net));
        else
            for (const auto* fr : frames_) out.push_back(network_forward(*fr, net));
        return out;
    }

    double validation_auc(std::span<const double> v) const { return roc_and_auc(scores(v), labels_).auc; }

    double operator()(std::span<const double> v) const { return 1.0 - validation_auc(v); }

  private:
    ParamCodec codec_;
    bool freeze_;
    std::vector<double> prefix_;
    std::vector<int> labels_;
    std::vector<std::vector<Tensor>> features_;
    std::vector<const std::vector<Tensor>*> frames_;
};

/// Trains on `data` (already normalised/masked) with SSA over the weight
/// vector; ssa.iter_max == 0 yields the best random initialisation.
inline TrainResult train_with_ssa(const Dataset& data, const Split& split, TrainConfig cfg,
                                  const std::function<void(const SparrowPopulation&)>& on_iteration = {}) {
    const auto t0 = std::chrono::steady_clock::now();
    cfg.network.validate();
    const WeightObjective obj(data, split.validation, cfg);
    cfg.ssa.lower.assign(obj.dim(), -cfg.weight_bound);
    cfg.ssa.upper.assign(obj.dim(), cfg.weight_bound);
    if (cfg.ssa.dim() != obj.dim()) throw ConfigError("ssa dimension does not match the parameter codec");

    const SsaResult r = ssa_optimize(obj, cfg.ssa, on_iteration);

    TrainResult out;
    out.ssa_dim = obj.dim();
    out.params = obj.full_params(r.best_position);
    if (cfg.calibrate_threshold) {
        // Shifting the head bias is monotone in the score, so the ranking
        // (and the AUC) is kept while score > 0.5 becomes the best validation cut.
        out.head_bias_shift = -best_logit_cut(obj.logits(r.best_position), obj.labels());
        out.params.back() += out.head_bias_shift;
    }
    out.history = r.history;
    out.validation_auc = 1.0 - r.best_fitness;
    out.test = evaluate(obj.codec().unflatten(out.params), subset(data, split.test));
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace ssanet
