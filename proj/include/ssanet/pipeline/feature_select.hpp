#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssanet/metrics.hpp"
#include "ssanet/pipeline/preprocess.hpp"
#include "ssanet/ssa.hpp"

namespace ssanet {

// SSA over relaxed pixel masks v in [0,1]^(H*W). A pixel is kept when
// v_p >= 0.5; if none is, the pixel with the largest v_p is kept (lowest
// index on ties). The mask is scored by
//   (1 - validation AUC of a nearest-centroid classifier) + lambda * kept / (H*W)
// where the classifier's per-sample features are the temporal means of the
// kept pixels and its centroids come from the train split. The classifier
// has no free parameters, so the objective is a pure function of the mask.

struct FeatureSelectConfig {
    SsaConfig ssa;  // bounds are overwritten with [0,1]^(H*W)
    double lambda = 0.05;
};

struct FeatureSelectResult {
    std::vector<std::uint8_t> mask;
    double objective = 0.0;
    std::vector<double> history;
};

inline std::vector<std::uint8_t> threshold_mask(std::span<const double> v) {
    std::vector<std::uint8_t> m(v.size(), 0);
    bool any = false;
    for (std::size_t p = 0; p < v.size(); ++p)
        if (v[p] >= 0.5) m[p] = 1, any = true;
    if (!any && !v.empty()) {
        std::size_t top = 0;
        for (std::size_t p = 1; p < v.size(); ++p)
            if (v[p] > v[top]) top = p;
        m[top] = 1;
    }
    return m;
}

/// Evaluates masks against fixed train/validation data.
class MaskObjective {
  public:
    MaskObjective(const Dataset& data, const Split& split, double lambda) : lambda_(lambda) {
        if (split.train.empty() || split.validation.empty())
            throw DomainError("feature selection needs non-empty train and validation splits");
        pixels_ = pixel_count(data.at(split.train.front()));
        auto features = [&](std::span<const std::size_t> idx, std::vector<std::vector<double>>& out,
                            std::vector<int>& labels) {
            for (auto i : idx) {
                out.push_back(temporal_means(data.at(i)));
                labels.push_back(data.at(i).label);
            }
        };
        std::vector<std::vector<double>> train_f;
        std::vector<int> train_l;
        features(split.train, train_f, train_l);
        features(split.validation, val_f_, val_l_);

        centroid0_.assign(pixels_, 0.0);
        centroid1_.assign(pixels_, 0.0);
        std::size_t n0 = 0, n1 = 0;
        for (std::size_t s = 0; s < train_f.size(); ++s) {
            auto& c = train_l[s] ? centroid1_ : centroid0_;
            (train_l[s] ? n1 : n0)++;
            for (std::size_t p = 0; p < pixels_; ++p) c[p] += train_f[s][p];
        }
        if (!n0 || !n1) throw DomainError("feature selection: train split must contain both classes");
        for (std::size_t p = 0; p < pixels_; ++p) {
            centroid0_[p] /= static_cast<double>(n0);
            centroid1_[p] /= static_cast<double>(n1);
        }
        int pos = 0;
        for (int l : val_l_) pos += l;
        if (pos == 0 || pos == static_cast<int>(val_l_.size()))
            throw DomainError("feature selection: validation split must contain both classes");
    }

    std::size_t pixels() const noexcept { return pixels_; }

    double mask_objective(std::span<const std::uint8_t> mask) const {
        std::vector<double> scores(val_f_.size(), 0.0);
        std::size_t kept = 0;
        for (std::size_t p = 0; p < pixels_; ++p) kept += mask[p] ? 1 : 0;
        for (std::size_t s = 0; s < val_f_.size(); ++s) {
            // ||f - c0||^2 - ||f - c1||^2 over kept pixels: larger means closer to class 1
            double sc = 0.0;
            for (std::size_t p = 0; p < pixels_; ++p) {
                if (!mask[p]) continue;
                const double a = val_f_[s][p] - centroid0_[p], b = val_f_[s][p] - centroid1_[p];
                sc += a * a - b * b;
            }
            scores[s] = sc;
        }
        const double auc = roc_and_auc(scores, val_l_).auc;
        return (1.0 - auc) + lambda_ * static_cast<double>(kept) / static_cast<double>(pixels_);
    }

    double operator()(std::span<const double> v) const { return mask_objective(threshold_mask(v)); }

  private:
    static std::size_t pixel_count(const SequenceSample& s) {
        const auto& f = s.frames.front();
        return f.dim(0) * f.dim(1);
    }

    static std::vector<double> temporal_means(const SequenceSample& s) {
        const std::size_t px = pixel_count(s), c = s.frames.front().dim(2);
        std::vector<double> m(px, 0.0);
        for (const auto& f : s.frames)
            for (std::size_t p = 0; p < px; ++p)
                for (std::size_t k = 0; k < c; ++k) m[p] += f[p * c + k];
        for (auto& v : m) v /= static_cast<double>(s.frames.size() * c);
        return m;
    }

    double lambda_;
    std::size_t pixels_ = 0;
    std::vector<double> centroid0_, centroid1_;
    std::vector<std::vector<double>> val_f_;
    std::vector<int> val_l_;
};

inline FeatureSelectResult feature_select_ssa(const Dataset& data, const Split& split, FeatureSelectConfig cfg) {
    const MaskObjective obj(data, split, cfg.lambda);
    cfg.ssa.lower.assign(obj.pixels(), 0.0);
    cfg.ssa.upper.assign(obj.pixels(), 1.0);
    const SsaResult r = ssa_optimize(obj, cfg.ssa);
    return {threshold_mask(r.best_position), r.best_fitness, r.history};
}

}  // namespace ssanet
