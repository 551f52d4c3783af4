#pragma once

#include <ostream>
#include <string>

#include "defectsim/simulation.hpp"

namespace defectsim {

// CSV numbers use up to six significant digits; table.md rounds to two
// decimals for readability.
std::string format_number(double value);
std::string format_fixed2(double value);

std::string trace_filename(const std::string& dataset, double n_percent, int rep);

void write_summary_csv(std::ostream& os, const std::vector<AggregateRow>& aggregates);
void write_runs_csv(std::ostream& os, const std::vector<RunRow>& rows);
void write_table_md(std::ostream& os, const std::vector<AggregateRow>& aggregates);
void write_trace_csv(std::ostream& os, const RunTrace& trace);

}  // namespace defectsim
