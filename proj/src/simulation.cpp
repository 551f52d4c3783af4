#include "defectsim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "defectsim/metrics.hpp"

namespace defectsim {

namespace {

Matrix to_matrix(const std::vector<std::vector<double>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    return m;
}

Matrix select_columns(const std::vector<std::vector<double>>& rows,
                      const std::vector<std::size_t>& indices) {
    Matrix m(rows.size(), indices.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < indices.size(); ++j) m(i, j) = rows[i][indices[j]];
    return m;
}

std::vector<double> select_features(std::span<const double> full,
                                    const std::vector<std::size_t>& indices) {
    std::vector<double> out(indices.size());
    for (std::size_t j = 0; j < indices.size(); ++j) out[j] = full[indices[j]];
    return out;
}

bool single_class(const std::vector<bool>& labels) {
    std::size_t positives = 0;
    for (bool v : labels) positives += v ? 1 : 0;
    return positives == 0 || positives == labels.size();
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_sd(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

void validate_config(const ScenarioConfig& cfg) {
    if (!(cfg.overlook_probability >= 0.0 && cfg.overlook_probability <= 1.0))
        throw std::invalid_argument("overlook_probability must be in [0, 1]");
    if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (cfg.warmup_min_size < 2) throw std::invalid_argument("warmup_min_size must be >= 2");
}

}  // namespace

bool observe_test_result(bool actual, bool predicted_defective, double overlook_probability,
                         Rng& rng) {
    if (!actual) return false;
    if (predicted_defective) return actual;
    // Negative prediction on a defective module: the defect escapes testing
    // with the configured probability.
    return rng.next_uniform() < overlook_probability ? false : true;
}

ModelBundle rebuild_model(const std::vector<std::vector<double>>& features,
                          const std::vector<bool>& observed_labels,
                          const ProjectDataset* prior, const ScenarioConfig& cfg,
                          std::optional<FeatureSubset>& fs_cache) {
    if (features.size() < cfg.warmup_min_size) return ForcedDefective{};
    if (single_class(observed_labels)) return ForcedDefective{};

    const std::size_t d = features.front().size();

    FittedBundle bundle;
    if (cfg.fs_cadence == FsCadence::OnceAfterWarmup && fs_cache.has_value()) {
        bundle.subset = *fs_cache;
    } else {
        try {
            bundle.subset = cfs_best_first(to_matrix(features, d), observed_labels);
        } catch (const std::invalid_argument&) {
            // Every feature is constant on the current learning set; there is
            // nothing to fit yet.
            return ForcedDefective{};
        }
        if (cfg.fs_cadence == FsCadence::OnceAfterWarmup) fs_cache = bundle.subset;
    }

    const Matrix selected = select_columns(features, bundle.subset.indices);
    bundle.standardizer = fit_standardizer(selected);

    Matrix standardized(selected.rows, selected.cols);
    for (std::size_t i = 0; i < selected.rows; ++i) {
        const std::vector<double> z = apply_standardizer(bundle.standardizer, selected.row(i));
        for (std::size_t j = 0; j < selected.cols; ++j) standardized(i, j) = z[j];
    }
    bundle.model = fit_logistic_ridge(standardized, observed_labels, cfg.ridge_lambda,
                                      cfg.max_iter, cfg.tol);

    std::vector<double> scores;
    std::vector<bool> score_labels;
    if (cfg.cutoff_source == CutoffSource::PriorVersion) {
        if (prior != nullptr) {
            scores.reserve(prior->size());
            score_labels.reserve(prior->size());
            for (const auto& rec : prior->records) {
                scores.push_back(predict_probability(
                    bundle.model, bundle.standardizer,
                    select_features(rec.features, bundle.subset.indices)));
                score_labels.push_back(rec.actual_defective);
            }
        }
    } else {
        scores.reserve(features.size());
        for (const auto& row : features)
            scores.push_back(predict_probability(bundle.model, bundle.standardizer,
                                                 select_features(row, bundle.subset.indices)));
        score_labels = observed_labels;
    }

    if (scores.empty() || single_class(score_labels)) {
        bundle.cutoff = 0.5;
        bundle.cutoff_fallback = true;
    } else {
        bundle.cutoff = std::clamp(closest_topleft_cutoff(scores, score_labels), 0.0, 1.0);
    }
    return bundle;
}

RunTrace simulate_run(const ProjectDataset& test, const ProjectDataset* prior,
                      const ScenarioConfig& cfg, int rep, std::uint64_t rep_seed) {
    validate_config(cfg);
    if (test.records.empty()) throw std::runtime_error("simulate: empty test set");
    {
        std::vector<bool> actual(test.size());
        for (std::size_t i = 0; i < test.size(); ++i)
            actual[i] = test.records[i].actual_defective;
        if (single_class(actual))
            throw std::runtime_error("simulate: test set '" + test.name +
                                     "' has single-class actual labels, AUC undefined");
    }
    if (cfg.learning_mode == LearningMode::SeededWithPrior && prior == nullptr)
        throw std::runtime_error("simulate: seeded learning mode requires a prior dataset");

    RunTrace trace;
    trace.config = cfg;
    trace.dataset = test.name;
    trace.rep = rep;
    trace.seed = rep_seed;

    Rng rng(rep_seed);
    trace.permutation = shuffle_permutation(test.size(), rng);

    std::vector<std::vector<double>> learning_features;
    std::vector<bool> learning_labels;
    if (cfg.learning_mode == LearningMode::SeededWithPrior) {
        for (const auto& rec : prior->records) {
            learning_features.push_back(rec.features);
            learning_labels.push_back(rec.actual_defective);
        }
    }

    std::optional<FeatureSubset> fs_cache;
    trace.outcomes.reserve(test.size());

    for (std::size_t position = 0; position < trace.permutation.size(); ++position) {
        const ModuleRecord& rec = test.records[trace.permutation[position]];

        const ModelBundle bundle =
            rebuild_model(learning_features, learning_labels, prior, cfg, fs_cache);

        PredictionOutcome out;
        out.position = position;
        out.module_id = rec.id;
        out.actual_defective = rec.actual_defective;

        if (std::holds_alternative<ForcedDefective>(bundle)) {
            out.forced = true;
            out.predicted_defective = true;
            out.score = 1.0;
        } else {
            const FittedBundle& fitted = std::get<FittedBundle>(bundle);
            out.score = predict_probability(fitted.model, fitted.standardizer,
                                            select_features(rec.features, fitted.subset.indices));
            out.predicted_defective = decide(out.score, fitted.cutoff);
            out.model_converged = fitted.model.converged;
        }

        out.observed_defective = observe_test_result(out.actual_defective,
                                                     out.predicted_defective,
                                                     cfg.overlook_probability, rng);

        learning_features.push_back(rec.features);
        learning_labels.push_back(out.observed_defective);
        trace.outcomes.push_back(std::move(out));
    }

    std::vector<double> scores(trace.outcomes.size());
    std::vector<bool> predictions(trace.outcomes.size());
    std::vector<bool> actuals(trace.outcomes.size());
    for (std::size_t i = 0; i < trace.outcomes.size(); ++i) {
        scores[i] = trace.outcomes[i].score;
        predictions[i] = trace.outcomes[i].predicted_defective;
        actuals[i] = trace.outcomes[i].actual_defective;
    }
    trace.auc = auc(scores, actuals);
    trace.f1 = f1_score(confusion(predictions, actuals));
    return trace;
}

ExperimentReport run_repetitions(const ProjectDataset& test, const ProjectDataset* prior,
                                 const ScenarioConfig& cfg, const TraceSink& trace_sink) {
    validate_config(cfg);

    ExperimentReport report;
    const double n_percent = cfg.overlook_probability * 100.0;

    std::vector<double> aucs;
    std::vector<double> f1s;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        const std::uint64_t rep_seed = cfg.base_seed + static_cast<std::uint64_t>(rep);
        try {
            const RunTrace trace = simulate_run(test, prior, cfg, rep, rep_seed);
            report.rows.push_back({test.name, n_percent, rep, rep_seed, trace.auc, trace.f1});
            aucs.push_back(trace.auc);
            f1s.push_back(trace.f1);
            if (trace_sink) trace_sink(trace);
        } catch (const std::exception& e) {
            ++report.warnings;
            report.diagnostics.push_back(test.name + " rep " + std::to_string(rep) + ": " +
                                         e.what());
        }
    }

    std::sort(report.rows.begin(), report.rows.end(), [](const RunRow& a, const RunRow& b) {
        return std::tie(a.dataset, a.n_percent, a.rep) < std::tie(b.dataset, b.n_percent, b.rep);
    });

    if (!aucs.empty()) {
        AggregateRow agg;
        agg.dataset = test.name;
        agg.n_percent = n_percent;
        agg.reps_used = static_cast<int>(aucs.size());
        agg.mean_auc = mean_of(aucs);
        agg.sd_auc = sample_sd(aucs, agg.mean_auc);
        agg.mean_f1 = mean_of(f1s);
        agg.sd_f1 = sample_sd(f1s, agg.mean_f1);
        report.aggregates.push_back(agg);
    }
    return report;
}

}  // namespace defectsim
