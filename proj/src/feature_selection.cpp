#include "defectsim/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace defectsim {

double pearson_correlation(std::span<const double> x, std::span<const double> y,
                           bool* degenerate) {
    if (degenerate) *degenerate = false;
    if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw std::invalid_argument("pearson: need at least two points");

    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationTables build_correlation_tables(const Matrix& X, const std::vector<bool>& y) {
    if (X.rows < 2) throw std::invalid_argument("correlation tables: need at least two rows");
    if (y.size() != X.rows) throw std::invalid_argument("correlation tables: label length mismatch");

    std::size_t positives = 0;
    for (bool v : y) positives += v ? 1 : 0;
    if (positives == 0 || positives == y.size())
        throw std::invalid_argument("correlation tables: labels contain a single class");

    std::vector<double> y01(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) y01[i] = y[i] ? 1.0 : 0.0;

    const std::size_t d = X.cols;
    std::vector<std::vector<double>> columns(d);
    for (std::size_t j = 0; j < d; ++j) columns[j] = X.column(j);

    CorrelationTables t;
    t.class_corr.assign(d, 0.0);
    t.excluded.assign(d, false);
    t.pairwise_corr.assign(d, std::vector<double>(d, 0.0));

    for (std::size_t j = 0; j < d; ++j) {
        bool degenerate = false;
        t.class_corr[j] = std::abs(pearson_correlation(columns[j], y01, &degenerate));
        if (degenerate) {
            t.excluded[j] = true;
            t.class_corr[j] = 0.0;
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        t.pairwise_corr[i][i] = 1.0;
        for (std::size_t j = i + 1; j < d; ++j) {
            double r = 0.0;
            if (!t.excluded[i] && !t.excluded[j])
                r = std::abs(pearson_correlation(columns[i], columns[j]));
            t.pairwise_corr[i][j] = r;
            t.pairwise_corr[j][i] = r;
        }
    }
    return t;
}

double cfs_merit(std::span<const std::size_t> subset, const CorrelationTables& tables) {
    if (subset.empty()) throw std::invalid_argument("cfs merit: empty subset");
    const auto k = static_cast<double>(subset.size());

    double sum_cf = 0.0;
    for (std::size_t f : subset) sum_cf += tables.class_corr[f];
    const double mean_cf = sum_cf / k;

    double mean_ff = 0.0;
    if (subset.size() > 1) {
        double sum_ff = 0.0;
        for (std::size_t a = 0; a < subset.size(); ++a)
            for (std::size_t b = a + 1; b < subset.size(); ++b)
                sum_ff += tables.pairwise_corr[subset[a]][subset[b]];
        mean_ff = sum_ff / (k * (k - 1.0) / 2.0);
    }
    return k * mean_cf / std::sqrt(k + k * (k - 1.0) * mean_ff);
}

namespace {

struct SearchNode {
    std::vector<std::size_t> indices;  // sorted
    double merit = 0.0;
};

// Higher merit first; ties go to the lexicographically smaller subset so the
// search order is deterministic.
struct NodeWorse {
    bool operator()(const SearchNode& a, const SearchNode& b) const {
        if (a.merit != b.merit) return a.merit < b.merit;
        return a.indices > b.indices;
    }
};

std::uint64_t subset_mask(const std::vector<std::size_t>& indices) {
    std::uint64_t m = 0;
    for (std::size_t f : indices) m |= std::uint64_t{1} << f;
    return m;
}

}  // namespace

FeatureSubset cfs_best_first(const CorrelationTables& tables, std::size_t stall_limit) {
    const std::size_t d = tables.dimension();
    if (d > 64) throw std::invalid_argument("cfs: more than 64 features not supported");

    std::vector<std::size_t> usable;
    for (std::size_t j = 0; j < d; ++j)
        if (!tables.excluded[j]) usable.push_back(j);
    if (usable.empty()) throw std::invalid_argument("cfs: all features excluded (zero variance)");

    std::priority_queue<SearchNode, std::vector<SearchNode>, NodeWorse> open;
    std::unordered_set<std::uint64_t> visited;
    open.push(SearchNode{{}, 0.0});
    visited.insert(0);

    SearchNode best{{}, -std::numeric_limits<double>::infinity()};
    std::size_t stall = 0;

    while (!open.empty()) {
        SearchNode node = open.top();
        open.pop();

        if (node.merit > best.merit) {
            best = node;
            stall = 0;
        } else if (++stall >= stall_limit) {
            break;
        }

        for (std::size_t f : usable) {
            if (std::binary_search(node.indices.begin(), node.indices.end(), f)) continue;
            SearchNode child;
            child.indices = node.indices;
            child.indices.insert(
                std::upper_bound(child.indices.begin(), child.indices.end(), f), f);
            if (!visited.insert(subset_mask(child.indices)).second) continue;
            child.merit = cfs_merit(child.indices, tables);
            open.push(std::move(child));
        }
    }

    if (best.indices.empty()) {
        // Nothing beat the empty start node; take the strongest singleton.
        std::size_t argmax = usable[0];
        for (std::size_t f : usable)
            if (tables.class_corr[f] > tables.class_corr[argmax]) argmax = f;
        best.indices = {argmax};
        best.merit = cfs_merit(best.indices, tables);
    }
    return FeatureSubset{std::move(best.indices), best.merit};
}

FeatureSubset cfs_best_first(const Matrix& X, const std::vector<bool>& y,
                             std::size_t stall_limit) {
    return cfs_best_first(build_correlation_tables(X, y), stall_limit);
}

}  // namespace defectsim
