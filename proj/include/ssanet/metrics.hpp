#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "ssanet/errors.hpp"

namespace ssanet {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t tn = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    std::uint64_t total() const noexcept { return tp + tn + fp + fn; }
};

inline double accuracy(const ConfusionCounts& c) {
    if (c.total() == 0) throw DomainError("accuracy: all confusion counts are zero");
    return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

/// Counts with the strict rule score > threshold => positive.
inline ConfusionCounts confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold) {
    if (scores.size() != labels.size()) throw DimensionError("confusion_at: scores and labels differ in length");
    ConfusionCounts c;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = scores[i] > threshold;
        if (labels[i]) (pred ? c.tp : c.fn)++;
        else (pred ? c.fp : c.tn)++;
    }
    return c;
}

struct RocPoint {
    double fpr;
    double tpr;
};

struct RocCurve {
    std::vector<RocPoint> points;  // (0,0) ... (1,1), both coordinates non-decreasing
};

struct RocResult {
    RocCurve curve;
    double auc;
};

/// ROC by sweeping the distinct scores from high to low; tied scores move
/// in one diagonal segment. AUC is the trapezoid area under those points,
/// accumulated in integer half-units (2 * P * N scale) so it is exact up to
/// the final division and coincides with the rank statistic where a tied
/// positive/negative pair counts one half.
inline RocResult roc_and_auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) throw DimensionError("roc_and_auc: scores and labels differ in length");
    std::uint64_t pos = 0, neg = 0;
    for (int l : labels) {
        if (l != 0 && l != 1) throw DomainError("roc_and_auc: labels must be 0 or 1");
        (l ? pos : neg)++;
    }
    if (pos == 0 || neg == 0) throw DomainError("roc_and_auc: AUC undefined unless both classes are present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocResult r;
    r.curve.points.push_back({0.0, 0.0});
    std::uint64_t tp = 0, fp = 0;
    std::uint64_t twice_area = 0;  // in units of 1 / (P * N)
    for (std::size_t i = 0; i < order.size();) {
        std::uint64_t gp = 0, gn = 0;
        const double s = scores[order[i]];
        for (; i < order.size() && scores[order[i]] == s; ++i) (labels[order[i]] ? gp : gn)++;
        twice_area += gn * (2 * tp + gp);
        tp += gp;
        fp += gn;
        r.curve.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                                  static_cast<double>(tp) / static_cast<double>(pos)});
    }
    r.auc = static_cast<double>(twice_area) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
    return r;
}

enum class MapePolicy { error_on_zero, exclude_zero_targets };

struct RegressionErrors {
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    std::optional<double> mape_percent;  // empty only when every target was excluded
    std::size_t mape_excluded = 0;       // zero targets dropped under exclude_zero_targets
};

inline RegressionErrors regression_errors(std::span<const double> y, std::span<const double> yhat,
                                          MapePolicy policy = MapePolicy::error_on_zero) {
    if (y.size() != yhat.size()) throw DimensionError("regression_errors: y and yhat differ in length");
    if (y.empty()) throw DomainError("regression_errors: empty input");
    RegressionErrors e;
    double abs_sum = 0.0, sq_sum = 0.0, pct_sum = 0.0;
    std::size_t pct_n = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        abs_sum += std::abs(d);
        sq_sum += d * d;
        if (y[i] == 0.0) {
            if (policy == MapePolicy::error_on_zero)
                throw MapePolicyError("regression_errors: target " + std::to_string(i) +
                                      " is zero; MAPE undefined without zero-target exclusion");
            ++e.mape_excluded;
        } else {
            pct_sum += std::abs(d) / std::abs(y[i]);
            ++pct_n;
        }
    }
    const double n = static_cast<double>(y.size());
    e.mae = abs_sum / n;
    e.mse = sq_sum / n;
    e.rmse = std::sqrt(e.mse);
    if (pct_n) e.mape_percent = 100.0 * pct_sum / static_cast<double>(pct_n);
    return e;
}

}  // namespace ssanet
