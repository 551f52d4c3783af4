#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace defectsim {

// Column layout of a defect CSV: named metric columns, a bug-count column,
// and optional leading identifier columns (module name, version, class).
struct MetricSchema {
    std::vector<std::string> metric_names;
    std::string label_column = "bug";
    std::vector<std::string> id_columns;

    std::size_t dimension() const { return metric_names.size(); }

    // The stock PROMISE ck-metric layout: name/version/name.1 identifiers,
    // 20 product metrics, trailing "bug" count.
    static MetricSchema promise_ck();

    // Throws std::invalid_argument if metric names are empty, duplicated,
    // or the label column collides with a metric.
    void validate() const;
};

struct ModuleRecord {
    std::string id;
    std::vector<std::string> id_cells;  // raw identifier cells, kept so round-trips are exact
    std::vector<double> features;
    long bug_count = 0;
    bool actual_defective = false;
};

struct ProjectDataset {
    std::string name;
    std::string version;
    MetricSchema schema;  // id_columns reflect what the source file actually had
    std::vector<ModuleRecord> records;

    std::size_t size() const { return records.size(); }
};

struct DatasetSummary {
    std::size_t module_count = 0;
    std::size_t defective_count = 0;
    double defective_pct = 0.0;  // 0..100
};

enum class FindingKind { DuplicateId, ConstantColumn, NonFinite };

struct Finding {
    FindingKind kind;
    std::string detail;
};

// CSV parse failure; line is the 1-based line number in the input
// (the header is line 1).
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& message);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline bool derive_label(long bug_count) { return bug_count > 0; }

ProjectDataset parse_defect_csv(std::istream& in, const MetricSchema& schema,
                                std::string name = "", std::string version = "");
ProjectDataset load_defect_csv(const std::string& path, const MetricSchema& schema,
                               std::string name = "", std::string version = "");

// Inverse of parse_defect_csv: header plus one row per record, doubles in
// shortest round-trip form.
std::string serialize_defect_csv(const ProjectDataset& ds);

DatasetSummary summarize(const ProjectDataset& ds);

// Data-quality findings: duplicate ids, constant metric columns, non-finite
// values. An empty result means clean; findings are reports, not failures.
std::vector<Finding> validate_dataset(const ProjectDataset& ds);

}  // namespace defectsim
