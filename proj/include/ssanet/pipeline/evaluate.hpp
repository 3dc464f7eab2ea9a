#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ssanet/metrics.hpp"
#include "ssanet/neural/network.hpp"
#include "ssanet/pipeline/dataset.hpp"

namespace ssanet {

/// Everything reported for one scored split.
///
/// Regression errors are taken between the per-sample scores and (a) the
/// {0,1} labels, (b) the injected anomaly magnitude. Both use zero-target
/// exclusion for MAPE, so the MAPE terms come from anomalous samples only.
struct MetricsReport {
    std::size_t n = 0;
    double threshold = 0.5;
    ConfusionCounts confusion;
    double accuracy = 0.0;
    bool auc_defined = false;  // false when the split holds a single class
    std::optional<double> auc;
    std::vector<RocPoint> roc;
    RegressionErrors vs_label;
    RegressionErrors vs_magnitude;
};

inline MetricsReport score_report(std::span<const double> scores, std::span<const int> labels,
                                  std::span<const double> magnitudes, double threshold = 0.5) {
    if (scores.size() != labels.size() || scores.size() != magnitudes.size())
        throw DimensionError("score_report: scores, labels and magnitudes differ in length");
    MetricsReport r;
    r.n = scores.size();
    r.threshold = threshold;
    r.confusion = confusion_at(scores, labels, threshold);
    r.accuracy = accuracy(r.confusion);
    const bool both = r.confusion.tp + r.confusion.fn > 0 && r.confusion.tn + r.confusion.fp > 0;
    if (both) {
        auto roc = roc_and_auc(scores, labels);
        r.auc_defined = true;
        r.auc = roc.auc;
        r.roc = std::move(roc.curve.points);
    }
    std::vector<double> ylab(labels.begin(), labels.end());
    r.vs_label = regression_errors(ylab, scores, MapePolicy::exclude_zero_targets);
    r.vs_magnitude = regression_errors(magnitudes, scores, MapePolicy::exclude_zero_targets);
    return r;
}

/// Scores every sample through the full network, then reports.
inline MetricsReport evaluate(const Network& net, const Dataset& data) {
    std::vector<double> scores;
    std::vector<int> labels;
    std::vector<double> mags;
    for (const auto& s : data) {
        scores.push_back(network_forward(s.frames, net));
        labels.push_back(s.label);
        mags.push_back(s.anomaly_magnitude);
    }
    return score_report(scores, labels, mags);
}

}  // namespace ssanet
