#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "defectsim/simulation.hpp"

namespace defectsim {

enum class Command { Run, Simulate, Metrics };

struct DatasetSpec {
    std::string name;
    std::string train_path;
    std::string test_path;
};

struct ExperimentPlan {
    Command command = Command::Run;
    std::vector<DatasetSpec> datasets;
    std::vector<double> overlook_percents;  // percents, converted to probabilities per run
    ScenarioConfig config;
    std::string out_dir = "./out";
    bool emit_traces = false;
    std::string scores_path;  // metrics subcommand only
    std::optional<double> cutoff;
};

// Bad invocations surface as UsageError so main can print the message and
// exit without a stack trace.
struct UsageError : std::runtime_error {
    UsageError(const std::string& msg, int code) : std::runtime_error(msg), exit_code(code) {}
    int exit_code;
};

// args excludes the program name.
ExperimentPlan parse_args(const std::vector<std::string>& args);

int run_experiment_command(const ExperimentPlan& plan, std::ostream& out, std::ostream& err);
int simulate_command(const ExperimentPlan& plan, std::ostream& out, std::ostream& err);
int metrics_command(const ExperimentPlan& plan, std::ostream& out, std::ostream& err);

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace defectsim
