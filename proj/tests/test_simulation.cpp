#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "defectsim/dataset.hpp"
#include "defectsim/metrics.hpp"
#include "defectsim/rng.hpp"
#include "defectsim/simulation.hpp"

using namespace defectsim;

namespace {

const std::string kDataDir = DEFECTSIM_DATA_DIR;

// Balanced, easily learnable toy project: feature 0 separates the classes
// with a clear gap, the others are noise. Alternating labels keep every
// shuffled warmup prefix two-class with high probability.
ProjectDataset synthetic_dataset(std::size_t n, std::uint64_t seed, const std::string& name) {
    Rng rng(seed);
    ProjectDataset ds;
    ds.name = name;
    ds.schema.metric_names = {"f0", "f1", "f2"};
    ds.schema.label_column = "bug";
    for (std::size_t i = 0; i < n; ++i) {
        ModuleRecord rec;
        rec.id = "m" + std::to_string(i);
        const bool defective = i % 2 == 0;
        const double base = defective ? 3.0 : 0.0;
        rec.features = {base + rng.next_uniform() * 2.0, rng.next_uniform() * 10.0,
                        rng.next_uniform() * 10.0};
        rec.bug_count = defective ? 1 : 0;
        rec.actual_defective = defective;
        ds.records.push_back(std::move(rec));
    }
    return ds;
}

ScenarioConfig accumulated_config(double overlook) {
    ScenarioConfig cfg;
    cfg.overlook_probability = overlook;
    cfg.cutoff_source = CutoffSource::Accumulated;
    return cfg;
}

std::vector<double> subset_features(const std::vector<double>& full,
                                    const std::vector<std::size_t>& indices) {
    std::vector<double> out;
    out.reserve(indices.size());
    for (std::size_t j : indices) out.push_back(full[j]);
    return out;
}

}  // namespace

TEST_CASE("observe_test_result follows the overlooking rules and draw budget") {
    Rng rng(1);

    SUBCASE("clean modules always test clean without drawing") {
        CHECK(observe_test_result(false, false, 0.8, rng) == false);
        CHECK(observe_test_result(false, true, 0.8, rng) == false);
        CHECK(rng.uniform_draws() == 0);
    }
    SUBCASE("positive predictions expose the truth without drawing") {
        CHECK(observe_test_result(true, true, 1.0, rng) == true);
        CHECK(rng.uniform_draws() == 0);
    }
    SUBCASE("negative prediction on a defective module draws exactly once") {
        CHECK(observe_test_result(true, false, 0.0, rng) == true);
        CHECK(rng.uniform_draws() == 1);
        CHECK(observe_test_result(true, false, 1.0, rng) == false);
        CHECK(rng.uniform_draws() == 2);
    }
    SUBCASE("overlook rate 0.8 hides roughly that share of defects") {
        int hidden = 0;
        for (int i = 0; i < 10000; ++i)
            hidden += observe_test_result(true, false, 0.8, rng) ? 0 : 1;
        CHECK(hidden > 7700);
        CHECK(hidden < 8300);
    }
}

TEST_CASE("scripted four-module replay corrupts exactly the negative predictions") {
    // Four defective modules tested in order; the model calls only the second
    // one defective. With certain overlooking every negative prediction turns
    // into an observed non-defect while the positive one stays truthful.
    Rng rng(99);
    const std::vector<bool> predictions{false, true, false, false};
    std::vector<bool> observed;
    for (bool predicted : predictions)
        observed.push_back(observe_test_result(true, predicted, 1.0, rng));
    CHECK(observed == std::vector<bool>{false, true, false, false});
}

TEST_CASE("rebuild_model forces defective until the learning set is usable") {
    const ScenarioConfig cfg = accumulated_config(0.0);
    std::optional<FeatureSubset> cache;

    SUBCASE("empty learning set") {
        const ModelBundle bundle = rebuild_model({}, {}, nullptr, cfg, cache);
        CHECK(std::holds_alternative<ForcedDefective>(bundle));
    }
    SUBCASE("below warmup size") {
        std::vector<std::vector<double>> features(4, std::vector<double>{1, 2, 3});
        const std::vector<bool> labels{true, false, true, false};
        const ModelBundle bundle = rebuild_model(features, labels, nullptr, cfg, cache);
        CHECK(std::holds_alternative<ForcedDefective>(bundle));
    }
    SUBCASE("single-class observations") {
        std::vector<std::vector<double>> features;
        for (int i = 0; i < 8; ++i)
            features.push_back({static_cast<double>(i), 1.0, 2.0});
        const std::vector<bool> labels(8, false);
        const ModelBundle bundle = rebuild_model(features, labels, nullptr, cfg, cache);
        CHECK(std::holds_alternative<ForcedDefective>(bundle));
    }
    SUBCASE("all features constant") {
        std::vector<std::vector<double>> features(8, std::vector<double>{7, 7, 7});
        std::vector<bool> labels(8, false);
        for (int i = 0; i < 4; ++i) labels[i] = true;
        const ModelBundle bundle = rebuild_model(features, labels, nullptr, cfg, cache);
        CHECK(std::holds_alternative<ForcedDefective>(bundle));
    }
}

TEST_CASE("rebuild_model fits a usable learning set and finds the separating feature") {
    Rng rng(17);
    std::vector<std::vector<double>> features;
    std::vector<bool> labels;
    for (int i = 0; i < 20; ++i) {
        const bool defective = i % 2 == 0;
        features.push_back({rng.next_uniform(), rng.next_uniform(), rng.next_uniform(),
                            defective ? 5.0 + rng.next_uniform() : rng.next_uniform()});
        labels.push_back(defective);
    }

    std::optional<FeatureSubset> cache;
    const ModelBundle bundle =
        rebuild_model(features, labels, nullptr, accumulated_config(0.0), cache);
    REQUIRE(std::holds_alternative<FittedBundle>(bundle));

    const FittedBundle& fitted = std::get<FittedBundle>(bundle);
    CHECK(std::find(fitted.subset.indices.begin(), fitted.subset.indices.end(),
                    std::size_t{3}) != fitted.subset.indices.end());
    CHECK(fitted.cutoff >= 0.0);
    CHECK(fitted.cutoff <= 1.0);
    CHECK_FALSE(fitted.cutoff_fallback);
}

TEST_CASE("rebuild_model falls back to cutoff 0.5 without a cutoff source") {
    Rng rng(23);
    std::vector<std::vector<double>> features;
    std::vector<bool> labels;
    for (int i = 0; i < 12; ++i) {
        features.push_back({static_cast<double>(i) + rng.next_uniform(), rng.next_uniform()});
        labels.push_back(i >= 6);
    }

    ScenarioConfig cfg;  // cutoff_source = PriorVersion, but no prior is given
    std::optional<FeatureSubset> cache;
    const ModelBundle bundle = rebuild_model(features, labels, nullptr, cfg, cache);
    REQUIRE(std::holds_alternative<FittedBundle>(bundle));
    const FittedBundle& fitted = std::get<FittedBundle>(bundle);
    CHECK(fitted.cutoff == 0.5);
    CHECK(fitted.cutoff_fallback);
}

TEST_CASE("feature selection cadence once reuses the cached subset") {
    Rng rng(31);
    std::vector<std::vector<double>> features;
    std::vector<bool> labels;
    for (int i = 0; i < 16; ++i) {
        const bool defective = i % 2 == 0;
        features.push_back({defective ? 4.0 + rng.next_uniform() : rng.next_uniform(),
                            rng.next_uniform()});
        labels.push_back(defective);
    }

    ScenarioConfig cfg = accumulated_config(0.0);
    cfg.fs_cadence = FsCadence::OnceAfterWarmup;

    std::optional<FeatureSubset> cache;
    const ModelBundle first = rebuild_model(features, labels, nullptr, cfg, cache);
    REQUIRE(std::holds_alternative<FittedBundle>(first));
    REQUIRE(cache.has_value());
    const std::vector<std::size_t> cached = cache->indices;

    // Rewire feature 1 to be the separating one; the cached subset must win.
    for (int i = 0; i < 16; ++i) {
        features[i][1] = labels[i] ? 9.0 + rng.next_uniform() : rng.next_uniform();
        features[i][0] = rng.next_uniform();
    }
    const ModelBundle second = rebuild_model(features, labels, nullptr, cfg, cache);
    REQUIRE(std::holds_alternative<FittedBundle>(second));
    CHECK(std::get<FittedBundle>(second).subset.indices == cached);

    ScenarioConfig per_rebuild = accumulated_config(0.0);
    std::optional<FeatureSubset> fresh;
    const ModelBundle redone = rebuild_model(features, labels, nullptr, per_rebuild, fresh);
    REQUIRE(std::holds_alternative<FittedBundle>(redone));
    CHECK(std::get<FittedBundle>(redone).subset.indices != cached);
}

TEST_CASE("simulate_run covers every module exactly once") {
    const ProjectDataset test = synthetic_dataset(40, 1100, "toy");
    const RunTrace trace = simulate_run(test, nullptr, accumulated_config(0.0), 0, 42);

    REQUIRE(trace.outcomes.size() == test.size());

    std::vector<std::size_t> sorted = trace.permutation;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) REQUIRE(sorted[i] == i);

    std::set<std::string> ids;
    for (const auto& out : trace.outcomes) ids.insert(out.module_id);
    CHECK(ids.size() == test.size());

    for (std::size_t i = 0; i < trace.outcomes.size(); ++i) {
        REQUIRE(trace.outcomes[i].position == i);
        REQUIRE(trace.outcomes[i].module_id == test.records[trace.permutation[i]].id);
    }
}

TEST_CASE("cold start forces the warmup prefix defective") {
    const ProjectDataset test = synthetic_dataset(40, 1200, "toy");
    const ScenarioConfig cfg = accumulated_config(0.0);
    const RunTrace trace = simulate_run(test, nullptr, cfg, 0, 42);

    for (std::size_t i = 0; i < cfg.warmup_min_size; ++i) {
        REQUIRE(trace.outcomes[i].forced);
        REQUIRE(trace.outcomes[i].predicted_defective);
        REQUIRE(trace.outcomes[i].score == 1.0);
    }
    bool any_fitted = false;
    for (const auto& out : trace.outcomes) any_fitted = any_fitted || !out.forced;
    CHECK(any_fitted);
}

TEST_CASE("trace invariants hold at the overlooking extremes") {
    const ProjectDataset test = synthetic_dataset(40, 1300, "toy");

    SUBCASE("no overlooking reveals every label") {
        const RunTrace trace = simulate_run(test, nullptr, accumulated_config(0.0), 0, 7);
        for (const auto& out : trace.outcomes)
            REQUIRE(out.observed_defective == out.actual_defective);
    }
    SUBCASE("certain overlooking hides every negatively predicted defect") {
        const RunTrace trace = simulate_run(test, nullptr, accumulated_config(1.0), 0, 7);
        for (const auto& out : trace.outcomes) {
            if (!out.actual_defective) REQUIRE_FALSE(out.observed_defective);
            if (out.predicted_defective)
                REQUIRE(out.observed_defective == out.actual_defective);
            if (!out.predicted_defective && out.actual_defective)
                REQUIRE_FALSE(out.observed_defective);
        }
    }
}

TEST_CASE("trace metrics are computed against the actual labels") {
    const ProjectDataset test = synthetic_dataset(36, 1400, "toy");
    const RunTrace trace = simulate_run(test, nullptr, accumulated_config(0.8), 2, 44);

    std::vector<double> scores;
    std::vector<bool> predictions, actuals;
    for (const auto& out : trace.outcomes) {
        scores.push_back(out.score);
        predictions.push_back(out.predicted_defective);
        actuals.push_back(out.actual_defective);
    }
    CHECK(trace.auc == auc(scores, actuals));
    CHECK(trace.f1 == f1_score(confusion(predictions, actuals)));
    CHECK(trace.rep == 2);
    CHECK(trace.seed == 44);
}

TEST_CASE("whole traces replay from the seed alone") {
    // Reproduces the permutation and every observed label with a fresh
    // generator: the simulation must consume exactly n - 1 shuffle draws plus
    // one draw per negatively-predicted defective module, nothing else.
    const ProjectDataset test = synthetic_dataset(40, 1500, "toy");
    const double overlook = 0.8;
    const RunTrace trace = simulate_run(test, nullptr, accumulated_config(overlook), 0, 4242);

    Rng replay(4242);
    CHECK(shuffle_permutation(test.size(), replay) == trace.permutation);

    std::uint64_t probabilistic = 0;
    for (const auto& out : trace.outcomes) {
        bool expected = false;
        if (out.actual_defective && out.predicted_defective) {
            expected = true;
        } else if (out.actual_defective && !out.predicted_defective) {
            ++probabilistic;
            expected = replay.next_uniform() < overlook ? false : true;
        }
        REQUIRE(out.observed_defective == expected);
    }
    CHECK(replay.uniform_draws() == (test.size() - 1) + probabilistic);
}

TEST_CASE("each prediction depends only on the preceding steps") {
    const ProjectDataset test = synthetic_dataset(30, 1600, "toy");
    const ScenarioConfig cfg = accumulated_config(0.8);
    const RunTrace trace = simulate_run(test, nullptr, cfg, 0, 99);

    std::vector<std::vector<double>> features;
    std::vector<bool> labels;
    for (const auto& out : trace.outcomes) {
        std::optional<FeatureSubset> cache;
        const ModelBundle bundle = rebuild_model(features, labels, nullptr, cfg, cache);
        if (std::holds_alternative<ForcedDefective>(bundle)) {
            REQUIRE(out.forced);
        } else {
            REQUIRE_FALSE(out.forced);
            const FittedBundle& fitted = std::get<FittedBundle>(bundle);
            const ModuleRecord& rec = test.records[trace.permutation[out.position]];
            const double score = predict_probability(
                fitted.model, fitted.standardizer,
                subset_features(rec.features, fitted.subset.indices));
            REQUIRE(out.score == score);
            REQUIRE(out.predicted_defective == decide(score, fitted.cutoff));
        }
        features.push_back(test.records[trace.permutation[out.position]].features);
        labels.push_back(out.observed_defective);
    }
}

TEST_CASE("seeded learning starts from the prior version") {
    const ProjectDataset prior = synthetic_dataset(30, 1700, "toy-prior");
    const ProjectDataset test = synthetic_dataset(30, 1800, "toy");

    ScenarioConfig cfg = accumulated_config(0.0);
    cfg.learning_mode = LearningMode::SeededWithPrior;
    const RunTrace trace = simulate_run(test, &prior, cfg, 0, 5);
    CHECK_FALSE(trace.outcomes.front().forced);

    CHECK_THROWS_AS(simulate_run(test, nullptr, cfg, 0, 5), std::runtime_error);
}

TEST_CASE("simulate_run rejects undefined inputs") {
    ProjectDataset empty;
    empty.name = "empty";
    CHECK_THROWS_AS(simulate_run(empty, nullptr, accumulated_config(0.0), 0, 1),
                    std::runtime_error);

    ProjectDataset uniform = synthetic_dataset(10, 1900, "uniform");
    for (auto& rec : uniform.records) {
        rec.bug_count = 1;
        rec.actual_defective = true;
    }
    CHECK_THROWS_AS(simulate_run(uniform, nullptr, accumulated_config(0.0), 0, 1),
                    std::runtime_error);
}

TEST_CASE("scenario configs are validated at the entry points") {
    const ProjectDataset test = synthetic_dataset(10, 2000, "toy");

    ScenarioConfig bad_overlook = accumulated_config(1.5);
    CHECK_THROWS_AS(simulate_run(test, nullptr, bad_overlook, 0, 1), std::invalid_argument);
    bad_overlook.overlook_probability = -0.1;
    CHECK_THROWS_AS(run_repetitions(test, nullptr, bad_overlook), std::invalid_argument);

    ScenarioConfig bad_reps = accumulated_config(0.0);
    bad_reps.repetitions = 0;
    CHECK_THROWS_AS(run_repetitions(test, nullptr, bad_reps), std::invalid_argument);

    ScenarioConfig bad_warmup = accumulated_config(0.0);
    bad_warmup.warmup_min_size = 1;
    CHECK_THROWS_AS(simulate_run(test, nullptr, bad_warmup, 0, 1), std::invalid_argument);
}

TEST_CASE("simulate_run is deterministic") {
    const ProjectDataset test = synthetic_dataset(30, 2100, "toy");
    const ScenarioConfig cfg = accumulated_config(0.8);
    const RunTrace a = simulate_run(test, nullptr, cfg, 0, 31);
    const RunTrace b = simulate_run(test, nullptr, cfg, 0, 31);

    CHECK(a.permutation == b.permutation);
    CHECK(a.auc == b.auc);
    CHECK(a.f1 == b.f1);
    REQUIRE(a.outcomes.size() == b.outcomes.size());
    for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
        REQUIRE(a.outcomes[i].score == b.outcomes[i].score);
        REQUIRE(a.outcomes[i].predicted_defective == b.outcomes[i].predicted_defective);
        REQUIRE(a.outcomes[i].observed_defective == b.outcomes[i].observed_defective);
        REQUIRE(a.outcomes[i].forced == b.outcomes[i].forced);
    }
}

TEST_CASE("run_repetitions aggregates per-rep rows") {
    const ProjectDataset test = synthetic_dataset(30, 2200, "toy");

    SUBCASE("single repetition aggregates to itself") {
        ScenarioConfig cfg = accumulated_config(0.0);
        cfg.repetitions = 1;
        const ExperimentReport report = run_repetitions(test, nullptr, cfg);
        REQUIRE(report.rows.size() == 1);
        REQUIRE(report.aggregates.size() == 1);
        CHECK(report.aggregates[0].mean_auc == report.rows[0].auc);
        CHECK(report.aggregates[0].mean_f1 == report.rows[0].f1);
        CHECK(report.aggregates[0].sd_auc == 0.0);
        CHECK(report.aggregates[0].reps_used == 1);
        CHECK(report.warnings == 0);
    }

    SUBCASE("seeds derive from the base and means match a direct fold") {
        ScenarioConfig cfg = accumulated_config(0.8);
        cfg.repetitions = 6;
        cfg.base_seed = 1000;

        int sink_calls = 0;
        const ExperimentReport report = run_repetitions(
            test, nullptr, cfg, [&](const RunTrace&) { ++sink_calls; });
        REQUIRE(report.rows.size() == 6);
        CHECK(sink_calls == 6);

        double auc_sum = 0.0, f1_sum = 0.0;
        for (std::size_t r = 0; r < report.rows.size(); ++r) {
            CHECK(report.rows[r].rep == static_cast<int>(r));
            CHECK(report.rows[r].seed == 1000 + r);
            CHECK(report.rows[r].n_percent == 80.0);
            auc_sum += report.rows[r].auc;
            f1_sum += report.rows[r].f1;
        }
        REQUIRE(report.aggregates.size() == 1);
        CHECK(std::abs(report.aggregates[0].mean_auc - auc_sum / 6.0) <= 1e-12);
        CHECK(std::abs(report.aggregates[0].mean_f1 - f1_sum / 6.0) <= 1e-12);

        double ss = 0.0;
        for (const auto& row : report.rows) {
            const double d = row.auc - report.aggregates[0].mean_auc;
            ss += d * d;
        }
        CHECK(report.aggregates[0].sd_auc == doctest::Approx(std::sqrt(ss / 5.0)));
    }

    SUBCASE("identical configs give identical reports") {
        ScenarioConfig cfg = accumulated_config(0.8);
        cfg.repetitions = 4;
        const ExperimentReport a = run_repetitions(test, nullptr, cfg);
        const ExperimentReport b = run_repetitions(test, nullptr, cfg);
        REQUIRE(a.rows.size() == b.rows.size());
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
            CHECK(a.rows[i].auc == b.rows[i].auc);
            CHECK(a.rows[i].f1 == b.rows[i].f1);
            CHECK(a.rows[i].seed == b.rows[i].seed);
        }
        CHECK(a.aggregates[0].mean_auc == b.aggregates[0].mean_auc);
        CHECK(a.aggregates[0].sd_auc == b.aggregates[0].sd_auc);
    }

    SUBCASE("rejected runs become warnings, not aggregates") {
        ProjectDataset uniform = synthetic_dataset(10, 2300, "uniform");
        for (auto& rec : uniform.records) {
            rec.bug_count = 0;
            rec.actual_defective = false;
        }
        ScenarioConfig cfg = accumulated_config(0.0);
        cfg.repetitions = 3;
        const ExperimentReport report = run_repetitions(uniform, nullptr, cfg);
        CHECK(report.rows.empty());
        CHECK(report.aggregates.empty());
        CHECK(report.warnings == 3);
        REQUIRE(report.diagnostics.size() == 3);
        CHECK(report.diagnostics[0].find("rep 0") != std::string::npos);
    }
}

TEST_CASE("certain overlooking degrades mean accuracy on a bundled project") {
    const MetricSchema schema = MetricSchema::promise_ck();
    const ProjectDataset prior =
        load_defect_csv(kDataDir + "/synapse-1.1.csv", schema, "synapse", "1.1");
    const ProjectDataset test =
        load_defect_csv(kDataDir + "/synapse-1.2.csv", schema, "synapse", "1.2");

    ScenarioConfig cfg;  // defaults: 10 reps, seed 42, prior cutoff
    cfg.overlook_probability = 0.0;
    const ExperimentReport baseline = run_repetitions(test, &prior, cfg);

    cfg.overlook_probability = 1.0;
    const ExperimentReport corrupted = run_repetitions(test, &prior, cfg);

    REQUIRE(baseline.aggregates.size() == 1);
    REQUIRE(corrupted.aggregates.size() == 1);
    CHECK(corrupted.aggregates[0].mean_auc < baseline.aggregates[0].mean_auc);
}
