#include "defectsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace defectsim {

namespace {

struct ClassCounts {
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

ClassCounts count_classes(std::span<const double> scores, const std::vector<bool>& labels,
                          const char* who) {
    if (scores.size() != labels.size())
        throw std::invalid_argument(std::string(who) + ": length mismatch");
    if (scores.empty()) throw std::invalid_argument(std::string(who) + ": empty input");
    ClassCounts c;
    for (bool v : labels) (v ? c.positives : c.negatives) += 1;
    if (c.positives == 0 || c.negatives == 0)
        throw std::invalid_argument(std::string(who) + ": labels contain a single class");
    return c;
}

}  // namespace

std::vector<RocPoint> roc_curve(std::span<const double> scores, const std::vector<bool>& labels) {
    const ClassCounts cc = count_classes(scores, labels, "roc_curve");
    const std::size_t n = scores.size();

    // Sort indices by descending score; walk groups of equal scores and take
    // the running counts at each group boundary.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    const double max_score = scores[order.front()];
    const double min_score = scores[order.back()];

    std::vector<RocPoint> points;
    points.push_back({max_score + 0.5, 0.0, 0.0});

    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) {
            (labels[order[j]] ? tp : fp) += 1;
            ++j;
        }
        const double threshold = j < n ? (scores[order[i]] + scores[order[j]]) / 2.0
                                       : min_score - 0.5;
        points.push_back({threshold,
                          static_cast<double>(tp) / static_cast<double>(cc.positives),
                          static_cast<double>(fp) / static_cast<double>(cc.negatives)});
        i = j;
    }
    return points;
}

double auc(std::span<const double> scores, const std::vector<bool>& labels) {
    const ClassCounts cc = count_classes(scores, labels, "auc");
    const std::size_t n = scores.size();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks: each tie group gets the average of the ranks it spans.
    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]]) positive_rank_sum += midrank;
        i = j;
    }

    const auto p = static_cast<double>(cc.positives);
    const auto q = static_cast<double>(cc.negatives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * q);
}

double closest_topleft_cutoff(std::span<const double> scores, const std::vector<bool>& labels) {
    const std::vector<RocPoint> points = roc_curve(scores, labels);
    // Points run from the largest threshold down, so on exact distance ties
    // the first (larger threshold, fewer positives) wins.
    const RocPoint* best = &points.front();
    double best_dist = std::hypot(1.0 - best->tpr, best->fpr);
    for (const RocPoint& pt : points) {
        const double dist = std::hypot(1.0 - pt.tpr, pt.fpr);
        if (dist < best_dist) {
            best = &pt;
            best_dist = dist;
        }
    }
    return best->threshold;
}

ConfusionCounts confusion(const std::vector<bool>& predictions, const std::vector<bool>& labels) {
    if (predictions.size() != labels.size())
        throw std::invalid_argument("confusion: length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] && labels[i]) ++c.tp;
        else if (predictions[i] && !labels[i]) ++c.fp;
        else if (!predictions[i] && labels[i]) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double f1_score(const ConfusionCounts& c) {
    const double denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(c.tp) / denom;
}

}  // namespace defectsim
