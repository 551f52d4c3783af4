#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace defectsim {

struct RocPoint {
    double threshold;
    double tpr;
    double fpr;
};

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
};

// ROC points under the p >= threshold positive rule. Candidate thresholds are
// the midpoints between consecutive distinct scores plus one sentinel below
// the minimum and one above the maximum; points come back in descending
// threshold order, so fpr and tpr are non-decreasing along the list. Throws
// std::invalid_argument when labels are single-class.
std::vector<RocPoint> roc_curve(std::span<const double> scores, const std::vector<bool>& labels);

// Mann-Whitney AUC via midranks: the probability a random positive outscores
// a random negative, ties counting one half. Throws on single-class labels.
double auc(std::span<const double> scores, const std::vector<bool>& labels);

// Threshold of the ROC point nearest (fpr, tpr) = (0, 1) in Euclidean
// distance; ties break toward the larger threshold.
double closest_topleft_cutoff(std::span<const double> scores, const std::vector<bool>& labels);

ConfusionCounts confusion(const std::vector<bool>& predictions, const std::vector<bool>& labels);

// 2tp / (2tp + fp + fn); 0 when the denominator is 0.
double f1_score(const ConfusionCounts& c);

}  // namespace defectsim
