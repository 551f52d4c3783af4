#include "defectsim/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <utility>

#include "CLI11.hpp"
#include "defectsim/dataset.hpp"
#include "defectsim/metrics.hpp"
#include "defectsim/report.hpp"

namespace defectsim {

namespace {

std::string stem_of(const std::string& path) {
    const std::string stem = std::filesystem::path(path).stem().string();
    return stem.empty() ? path : stem;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path.string());
    return os;
}

}  // namespace

ExperimentPlan parse_args(const std::vector<std::string>& args) {
    CLI::App app{"online defect prediction simulator with overlooked-defect feedback"};
    app.require_subcommand(1);

    std::vector<std::string> trains, tests, names;
    std::vector<double> percents{0.0, 80.0, 100.0};
    int reps = 10;
    std::uint64_t seed = 42;
    LearningMode mode = LearningMode::ColdStart;
    CutoffSource cutoff_source = CutoffSource::PriorVersion;
    FsCadence cadence = FsCadence::PerRebuild;
    int warmup = 5;
    std::string out_dir = "./out";
    bool trace = false;
    std::string scores_path;
    double cutoff_value = 0.5;

    const std::map<std::string, LearningMode> mode_map{
        {"cold", LearningMode::ColdStart}, {"seeded", LearningMode::SeededWithPrior}};
    const std::map<std::string, CutoffSource> cutoff_map{
        {"prior", CutoffSource::PriorVersion}, {"accumulated", CutoffSource::Accumulated}};
    const std::map<std::string, FsCadence> cadence_map{
        {"per-rebuild", FsCadence::PerRebuild}, {"once", FsCadence::OnceAfterWarmup}};

    CLI::App* run = app.add_subcommand("run", "full experiment grid with aggregated reports");
    CLI::App* simulate = app.add_subcommand("simulate", "single traced run (rep 0)");
    CLI::App* metrics = app.add_subcommand("metrics", "AUC/F1 for a score,label CSV");

    for (CLI::App* cmd : {run, simulate}) {
        cmd->add_option("--train", trains, "prior-version CSV (repeatable)");
        cmd->add_option("--test", tests, "test-version CSV (repeatable)");
        cmd->add_option("--name", names, "dataset label (defaults to the test file stem)");
        cmd->add_option("--overlook", percents,
                        "comma-separated overlook probabilities in percent")
            ->delimiter(',');
        cmd->add_option("--reps", reps, "repetitions per dataset and probability");
        cmd->add_option("--seed", seed, "base seed; rep r uses seed + r");
        cmd->add_option("--mode", mode, "learning start: cold or seeded")
            ->transform(CLI::CheckedTransformer(mode_map, CLI::ignore_case));
        cmd->add_option("--cutoff-source", cutoff_source,
                        "cutoff selection data: prior or accumulated")
            ->transform(CLI::CheckedTransformer(cutoff_map, CLI::ignore_case));
        cmd->add_option("--fs-cadence", cadence, "feature selection: per-rebuild or once")
            ->transform(CLI::CheckedTransformer(cadence_map, CLI::ignore_case));
        cmd->add_option("--warmup", warmup, "minimum learning-set size before fitting");
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_flag("--trace", trace, "emit per-run trace CSVs");
    }

    metrics->add_option("--scores", scores_path, "two-column CSV: score,label")->required();
    CLI::Option* cutoff_opt =
        metrics->add_option("--cutoff", cutoff_value, "fixed cutoff (default: auto from ROC)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        const int code = app.exit(e, os, os);
        throw UsageError(os.str(), code);
    }

    ExperimentPlan plan;

    if (metrics->parsed()) {
        plan.command = Command::Metrics;
        plan.scores_path = scores_path;
        if (cutoff_opt->count() > 0) plan.cutoff = cutoff_value;
        return plan;
    }

    plan.command = simulate->parsed() ? Command::Simulate : Command::Run;

    if (trains.empty() || tests.empty())
        throw UsageError("at least one --train/--test pair is required", 1);
    if (trains.size() != tests.size())
        throw UsageError("--train and --test must be given the same number of times", 1);
    if (names.size() > tests.size())
        throw UsageError("more --name values than --train/--test pairs", 1);
    if (percents.empty()) throw UsageError("--overlook needs at least one value", 1);
    for (double p : percents)
        if (!(p >= 0.0 && p <= 100.0))
            throw UsageError("--overlook values must lie in [0, 100]", 1);
    if (reps < 1) throw UsageError("--reps must be at least 1", 1);
    if (warmup < 2) throw UsageError("--warmup must be at least 2", 1);

    for (std::size_t i = 0; i < tests.size(); ++i) {
        DatasetSpec ds;
        ds.train_path = trains[i];
        ds.test_path = tests[i];
        ds.name = i < names.size() ? names[i] : stem_of(tests[i]);
        plan.datasets.push_back(std::move(ds));
    }
    plan.overlook_percents = percents;
    plan.config.repetitions = reps;
    plan.config.base_seed = seed;
    plan.config.learning_mode = mode;
    plan.config.cutoff_source = cutoff_source;
    plan.config.fs_cadence = cadence;
    plan.config.warmup_min_size = static_cast<std::size_t>(warmup);
    plan.out_dir = out_dir;
    plan.emit_traces = trace;

    if (plan.command == Command::Simulate) {
        if (!trace) throw UsageError("simulate requires --trace", 1);
        if (plan.datasets.size() != 1)
            throw UsageError("simulate takes exactly one --train/--test pair", 1);
    }
    return plan;
}

int run_experiment_command(const ExperimentPlan& plan, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    const MetricSchema schema = MetricSchema::promise_ck();

    std::vector<RunRow> rows;
    std::vector<AggregateRow> aggregates;
    std::vector<std::pair<std::string, RunTrace>> traces;
    std::vector<std::string> diagnostics;
    std::size_t expected_cells = 0;
    std::size_t filled_cells = 0;

    for (const DatasetSpec& ds : plan.datasets) {
        expected_cells += plan.overlook_percents.size();

        ProjectDataset prior, test;
        try {
            prior = load_defect_csv(ds.train_path, schema, ds.name, "prior");
            test = load_defect_csv(ds.test_path, schema, ds.name, "test");
        } catch (const std::exception& e) {
            diagnostics.push_back("dataset " + ds.name + ": " + e.what());
            continue;
        }

        for (double pct : plan.overlook_percents) {
            ScenarioConfig cfg = plan.config;
            cfg.overlook_probability = pct / 100.0;

            TraceSink sink;
            if (plan.emit_traces)
                sink = [&traces, &ds, pct](const RunTrace& t) {
                    traces.emplace_back(trace_filename(ds.name, pct, t.rep), t);
                };

            const ExperimentReport report = run_repetitions(test, &prior, cfg, sink);
            rows.insert(rows.end(), report.rows.begin(), report.rows.end());
            aggregates.insert(aggregates.end(), report.aggregates.begin(),
                              report.aggregates.end());
            diagnostics.insert(diagnostics.end(), report.diagnostics.begin(),
                               report.diagnostics.end());
            if (!report.aggregates.empty()) ++filled_cells;
        }
    }

    std::sort(rows.begin(), rows.end(), [](const RunRow& a, const RunRow& b) {
        return std::tie(a.dataset, a.n_percent, a.rep) < std::tie(b.dataset, b.n_percent, b.rep);
    });
    std::sort(aggregates.begin(), aggregates.end(),
              [](const AggregateRow& a, const AggregateRow& b) {
                  return std::tie(a.dataset, a.n_percent) < std::tie(b.dataset, b.n_percent);
              });
    std::sort(traces.begin(), traces.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    try {
        fs::create_directories(plan.out_dir);
        {
            auto os = open_output(fs::path(plan.out_dir) / "summary.csv");
            write_summary_csv(os, aggregates);
        }
        {
            auto os = open_output(fs::path(plan.out_dir) / "runs.csv");
            write_runs_csv(os, rows);
        }
        {
            auto os = open_output(fs::path(plan.out_dir) / "table.md");
            write_table_md(os, aggregates);
        }
        for (const auto& [filename, t] : traces) {
            auto os = open_output(fs::path(plan.out_dir) / filename);
            write_trace_csv(os, t);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    for (const std::string& d : diagnostics) err << "warning: " << d << "\n";
    out << "wrote " << aggregates.size() << " aggregate rows, " << rows.size() << " run rows";
    if (plan.emit_traces) out << ", " << traces.size() << " traces";
    out << " to " << plan.out_dir << "\n";

    return filled_cells == expected_cells ? 0 : 1;
}

int simulate_command(const ExperimentPlan& plan, std::ostream& out, std::ostream& err) {
    namespace fs = std::filesystem;
    const MetricSchema schema = MetricSchema::promise_ck();
    const DatasetSpec& ds = plan.datasets.front();

    try {
        const ProjectDataset prior = load_defect_csv(ds.train_path, schema, ds.name, "prior");
        const ProjectDataset test = load_defect_csv(ds.test_path, schema, ds.name, "test");

        ScenarioConfig cfg = plan.config;
        cfg.overlook_probability = plan.overlook_percents.front() / 100.0;

        const RunTrace trace = simulate_run(test, &prior, cfg, 0, cfg.base_seed);

        fs::create_directories(plan.out_dir);
        const std::string filename =
            trace_filename(ds.name, plan.overlook_percents.front(), trace.rep);
        auto os = open_output(fs::path(plan.out_dir) / filename);
        write_trace_csv(os, trace);

        out << filename << ": auc=" << format_number(trace.auc)
            << " f1=" << format_number(trace.f1) << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: dataset " << ds.name << ": " << e.what() << "\n";
        return 1;
    }
}

namespace {

// score,label rows; a single header line is tolerated and skipped.
void parse_score_file(std::istream& in, std::vector<double>& scores, std::vector<bool>& labels) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": expected 'score,label'");
        const std::string score_cell = line.substr(0, comma);
        const std::string label_cell = line.substr(comma + 1);

        double score = 0.0;
        auto [p, ec] = std::from_chars(score_cell.data(), score_cell.data() + score_cell.size(),
                                       score);
        if (ec != std::errc{} || p != score_cell.data() + score_cell.size()) {
            if (lineno == 1) continue;  // header
            throw std::runtime_error("line " + std::to_string(lineno) + ": bad score '" +
                                     score_cell + "'");
        }

        bool label = false;
        if (label_cell == "1" || label_cell == "true")
            label = true;
        else if (label_cell == "0" || label_cell == "false")
            label = false;
        else
            throw std::runtime_error("line " + std::to_string(lineno) + ": bad label '" +
                                     label_cell + "'");

        scores.push_back(score);
        labels.push_back(label);
    }
    if (scores.empty()) throw std::runtime_error("no score rows");
}

}  // namespace

int metrics_command(const ExperimentPlan& plan, std::ostream& out, std::ostream& err) {
    try {
        std::ifstream in(plan.scores_path);
        if (!in) throw std::runtime_error("cannot open file");

        std::vector<double> scores;
        std::vector<bool> labels;
        parse_score_file(in, scores, labels);

        const double cutoff = plan.cutoff ? *plan.cutoff : closest_topleft_cutoff(scores, labels);
        std::vector<bool> predictions(scores.size());
        for (std::size_t i = 0; i < scores.size(); ++i)
            predictions[i] = decide(scores[i], cutoff);

        out << "auc=" << format_number(auc(scores, labels)) << "\n";
        out << "cutoff=" << format_number(cutoff) << (plan.cutoff ? " (given)" : " (auto)")
            << "\n";
        out << "f1=" << format_number(f1_score(confusion(predictions, labels))) << "\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << plan.scores_path << ": " << e.what() << "\n";
        return 1;
    }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    ExperimentPlan plan;
    try {
        plan = parse_args(args);
    } catch (const UsageError& e) {
        (e.exit_code == 0 ? out : err) << e.what();
        return e.exit_code;
    }

    switch (plan.command) {
        case Command::Run:
            return run_experiment_command(plan, out, err);
        case Command::Simulate:
            return simulate_command(plan, out, err);
        case Command::Metrics:
            return metrics_command(plan, out, err);
    }
    return 1;
}

}  // namespace defectsim
