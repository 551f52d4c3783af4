#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "defectsim/matrix.hpp"

namespace defectsim {

// Absolute correlations used by the CFS merit: feature-to-class and the
// symmetric feature-to-feature table (diagonal 1). Zero-variance features
// carry zero entries and are flagged excluded.
struct CorrelationTables {
    std::vector<double> class_corr;
    std::vector<std::vector<double>> pairwise_corr;
    std::vector<bool> excluded;

    std::size_t dimension() const { return class_corr.size(); }
};

struct FeatureSubset {
    std::vector<std::size_t> indices;  // sorted
    double merit = 0.0;
};

inline constexpr std::size_t kDefaultStallLimit = 5;

// Sample Pearson r in [-1, 1]. Returns 0 for a zero-variance input and sets
// *degenerate when given. Throws std::invalid_argument on length mismatch or
// fewer than two points.
double pearson_correlation(std::span<const double> x, std::span<const double> y,
                           bool* degenerate = nullptr);

// Throws std::invalid_argument unless X has at least two rows and y contains
// both classes.
CorrelationTables build_correlation_tables(const Matrix& X, const std::vector<bool>& y);

// merit = k * mean(class_corr) / sqrt(k + k(k-1) * mean(pairwise_corr)),
// pair mean over distinct pairs (0 for singletons). Throws on an empty subset.
double cfs_merit(std::span<const std::size_t> subset, const CorrelationTables& tables);

// Best-first search over subsets: start from the empty set, expand by single
// feature additions, keep an open list ordered by merit (ties broken toward
// lexicographically smaller subsets), stop after stall_limit consecutive
// expansions that fail to improve the best merit. Falls back to the
// best-class-correlation singleton if nothing beats the empty set.
FeatureSubset cfs_best_first(const CorrelationTables& tables,
                             std::size_t stall_limit = kDefaultStallLimit);
FeatureSubset cfs_best_first(const Matrix& X, const std::vector<bool>& y,
                             std::size_t stall_limit = kDefaultStallLimit);

}  // namespace defectsim
