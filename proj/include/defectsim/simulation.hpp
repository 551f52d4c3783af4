#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "defectsim/dataset.hpp"
#include "defectsim/feature_selection.hpp"
#include "defectsim/logistic.hpp"
#include "defectsim/rng.hpp"

namespace defectsim {

enum class LearningMode { ColdStart, SeededWithPrior };
enum class CutoffSource { PriorVersion, Accumulated };
enum class FsCadence { PerRebuild, OnceAfterWarmup };

// Validated at the simulation entry points: overlook_probability must lie in
// [0, 1], repetitions must be >= 1, and warmup_min_size must be >= 2.
struct ScenarioConfig {
    double overlook_probability = 0.0;  // probability in [0, 1]
    int repetitions = 10;
    std::uint64_t base_seed = 42;
    LearningMode learning_mode = LearningMode::ColdStart;
    CutoffSource cutoff_source = CutoffSource::PriorVersion;
    FsCadence fs_cadence = FsCadence::PerRebuild;
    std::size_t warmup_min_size = 5;
    double ridge_lambda = 1e-4;
    int max_iter = 50;
    double tol = 1e-8;
};

// Degenerate model used while the learning set is too small or single-class:
// every module is predicted defective with score 1.
struct ForcedDefective {};

struct FittedBundle {
    FeatureSubset subset;
    Standardizer standardizer;
    LogisticModel model;
    double cutoff = 0.5;
    bool cutoff_fallback = false;  // 0.5 used because cutoff selection was unavailable
};

using ModelBundle = std::variant<ForcedDefective, FittedBundle>;

struct PredictionOutcome {
    std::size_t position = 0;
    std::string module_id;
    double score = 0.0;
    bool predicted_defective = false;
    bool forced = false;
    bool observed_defective = false;
    bool actual_defective = false;
    bool model_converged = true;  // IRLS convergence at this step; true for forced steps
};

struct RunTrace {
    ScenarioConfig config;
    std::string dataset;
    int rep = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> permutation;
    std::vector<PredictionOutcome> outcomes;
    double auc = 0.0;
    double f1 = 0.0;
};

struct RunRow {
    std::string dataset;
    double n_percent = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    double auc = 0.0;
    double f1 = 0.0;
};

struct AggregateRow {
    std::string dataset;
    double n_percent = 0.0;
    int reps_used = 0;
    double mean_auc = 0.0;
    double sd_auc = 0.0;
    double mean_f1 = 0.0;
    double sd_f1 = 0.0;
};

struct ExperimentReport {
    std::vector<RunRow> rows;
    std::vector<AggregateRow> aggregates;
    int warnings = 0;  // rejected repetitions, excluded from aggregates
    std::vector<std::string> diagnostics;
};

// The test outcome the learner gets to see. A truly clean module always tests
// clean; a predicted-defective module is tested thoroughly and yields the
// truth; a defective module predicted clean is overlooked with the given
// probability. Draws one uniform only in that last branch.
bool observe_test_result(bool actual, bool predicted_defective, double overlook_probability,
                         Rng& rng);

// Rebuild the model from the accumulated (features, observed label) pairs.
// Returns ForcedDefective while there are fewer than warmup_min_size records
// or the observed labels are single-class; otherwise runs feature selection
// (reusing fs_cache when the cadence asks for it), standardizes, fits, and
// picks the decision cutoff from the configured source.
ModelBundle rebuild_model(const std::vector<std::vector<double>>& features,
                          const std::vector<bool>& observed_labels,
                          const ProjectDataset* prior, const ScenarioConfig& cfg,
                          std::optional<FeatureSubset>& fs_cache);

// One full pass over the test set in a seeded random order, feeding each
// observed result back into the learning set before the next prediction.
// Throws std::runtime_error when the test set's actual labels are
// single-class (AUC would be undefined).
RunTrace simulate_run(const ProjectDataset& test, const ProjectDataset* prior,
                      const ScenarioConfig& cfg, int rep, std::uint64_t rep_seed);

using TraceSink = std::function<void(const RunTrace&)>;

// Repetition r runs with seed base_seed + r (64-bit wraparound). Rejected
// runs become diagnostics and a warning count; aggregates cover the rest.
ExperimentReport run_repetitions(const ProjectDataset& test, const ProjectDataset* prior,
                                 const ScenarioConfig& cfg,
                                 const TraceSink& trace_sink = nullptr);

}  // namespace defectsim
