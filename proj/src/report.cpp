#include "defectsim/report.hpp"

#include <cstdio>

namespace defectsim {

namespace {

const char* bool_cell(bool v) { return v ? "true" : "false"; }

}  // namespace

std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    return buf;
}

std::string format_fixed2(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

std::string trace_filename(const std::string& dataset, double n_percent, int rep) {
    return "trace_" + dataset + "_" + format_number(n_percent) + "_" + std::to_string(rep) +
           ".csv";
}

void write_summary_csv(std::ostream& os, const std::vector<AggregateRow>& aggregates) {
    os << "dataset,n_percent,reps_used,mean_auc,sd_auc,mean_f1,sd_f1\n";
    for (const auto& a : aggregates) {
        os << a.dataset << ',' << format_number(a.n_percent) << ',' << a.reps_used << ','
           << format_number(a.mean_auc) << ',' << format_number(a.sd_auc) << ','
           << format_number(a.mean_f1) << ',' << format_number(a.sd_f1) << '\n';
    }
}

void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows) {
    os << "dataset,n_percent,rep,seed,auc,f1\n";
    for (const auto& r : rows) {
        os << r.dataset << ',' << format_number(r.n_percent) << ',' << r.rep << ',' << r.seed
           << ',' << format_number(r.auc) << ',' << format_number(r.f1) << '\n';
    }
}

void write_table_md(std::ostream& os, const std::vector<AggregateRow>& aggregates) {
    os << "| Dataset | Overlooking (%) | AUC | F1 |\n";
    os << "| --- | --- | --- | --- |\n";
    for (const auto& a : aggregates) {
        std::string label = format_number(a.n_percent);
        if (a.n_percent == 0.0) label += " (baseline)";
        os << "| " << a.dataset << " | " << label << " | " << format_fixed2(a.mean_auc) << " | "
           << format_fixed2(a.mean_f1) << " |\n";
    }
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
    os << "position,module_id,score,predicted,forced,observed,actual\n";
    for (const auto& o : trace.outcomes) {
        os << o.position << ',' << o.module_id << ',' << format_number(o.score) << ','
           << bool_cell(o.predicted_defective) << ',' << bool_cell(o.forced) << ','
           << bool_cell(o.observed_defective) << ',' << bool_cell(o.actual_defective) << '\n';
    }
}

}  // namespace defectsim
