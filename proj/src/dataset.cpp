#include "defectsim/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace defectsim {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

bool parse_double(const std::string& cell, double& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && std::isfinite(out);
}

bool parse_bug_count(const std::string& cell, long& out) {
    const std::string t = trim(cell);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && out >= 0;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

MetricSchema MetricSchema::promise_ck() {
    MetricSchema s;
    s.metric_names = {"wmc",  "dit", "noc", "cbo", "rfc",    "lcom", "ca",
                      "ce",   "npm", "lcom3", "loc", "dam",  "moa",  "mfa",
                      "cam",  "ic",  "cbm", "amc", "max_cc", "avg_cc"};
    s.label_column = "bug";
    s.id_columns = {"name", "version", "name.1"};
    return s;
}

void MetricSchema::validate() const {
    if (metric_names.empty()) throw std::invalid_argument("schema has no metric columns");
    std::unordered_set<std::string> seen;
    for (const auto& m : metric_names) {
        if (m.empty()) throw std::invalid_argument("schema has an empty metric name");
        if (!seen.insert(m).second)
            throw std::invalid_argument("duplicate metric name: " + m);
        if (m == label_column)
            throw std::invalid_argument("label column '" + label_column + "' is also a metric");
    }
    if (label_column.empty()) throw std::invalid_argument("schema has no label column");
}

ProjectDataset parse_defect_csv(std::istream& in, const MetricSchema& schema,
                                std::string name, std::string version) {
    schema.validate();

    std::string line;
    if (!std::getline(in, line)) throw ParseError(1, "empty input, no header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    const std::vector<std::string> raw_header = split_csv_line(line);
    std::vector<std::string> header(raw_header.size());
    std::transform(raw_header.begin(), raw_header.end(), header.begin(),
                   [](const std::string& h) { return trim(h); });

    auto find_column = [&](const std::string& wanted) -> long {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == wanted) return static_cast<long>(i);
        return -1;
    };

    std::vector<std::size_t> metric_idx(schema.metric_names.size());
    for (std::size_t j = 0; j < schema.metric_names.size(); ++j) {
        const long at = find_column(schema.metric_names[j]);
        if (at < 0) throw ParseError(1, "missing column '" + schema.metric_names[j] + "'");
        metric_idx[j] = static_cast<std::size_t>(at);
    }
    const long label_at = find_column(schema.label_column);
    if (label_at < 0) throw ParseError(1, "missing column '" + schema.label_column + "'");
    const auto label_idx = static_cast<std::size_t>(label_at);

    // Identifier columns are optional; keep only the ones present.
    std::vector<std::string> present_ids;
    std::vector<std::size_t> id_idx;
    for (const auto& idc : schema.id_columns) {
        const long at = find_column(idc);
        if (at >= 0) {
            present_ids.push_back(idc);
            id_idx.push_back(static_cast<std::size_t>(at));
        }
    }

    ProjectDataset ds;
    ds.name = std::move(name);
    ds.version = std::move(version);
    ds.schema = schema;
    ds.schema.id_columns = present_ids;

    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;

        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError(line_no, "expected " + std::to_string(header.size()) +
                                          " fields, got " + std::to_string(cells.size()));

        ModuleRecord rec;
        rec.features.resize(schema.metric_names.size());
        for (std::size_t j = 0; j < metric_idx.size(); ++j) {
            if (!parse_double(cells[metric_idx[j]], rec.features[j]))
                throw ParseError(line_no, "non-numeric value '" + trim(cells[metric_idx[j]]) +
                                              "' in column '" + schema.metric_names[j] + "'");
        }
        if (!parse_bug_count(cells[label_idx], rec.bug_count))
            throw ParseError(line_no, "bug count '" + trim(cells[label_idx]) +
                                          "' is not a non-negative integer");
        rec.actual_defective = derive_label(rec.bug_count);

        for (std::size_t c : id_idx) rec.id_cells.push_back(trim(cells[c]));
        rec.id = rec.id_cells.empty() ? "row-" + std::to_string(ds.records.size())
                                      : rec.id_cells.back();

        ds.records.push_back(std::move(rec));
    }

    if (ds.records.empty()) throw ParseError(line_no, "no data rows");
    return ds;
}

ProjectDataset load_defect_csv(const std::string& path, const MetricSchema& schema,
                               std::string name, std::string version) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return parse_defect_csv(in, schema, std::move(name), std::move(version));
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

std::string serialize_defect_csv(const ProjectDataset& ds) {
    std::ostringstream out;
    bool first = true;
    for (const auto& idc : ds.schema.id_columns) {
        out << (first ? "" : ",") << idc;
        first = false;
    }
    for (const auto& m : ds.schema.metric_names) {
        out << (first ? "" : ",") << m;
        first = false;
    }
    out << (first ? "" : ",") << ds.schema.label_column << "\n";

    for (const auto& rec : ds.records) {
        first = true;
        for (const auto& cell : rec.id_cells) {
            out << (first ? "" : ",") << cell;
            first = false;
        }
        for (double v : rec.features) {
            out << (first ? "" : ",") << format_double(v);
            first = false;
        }
        out << (first ? "" : ",") << rec.bug_count << "\n";
    }
    return out.str();
}

DatasetSummary summarize(const ProjectDataset& ds) {
    DatasetSummary s;
    s.module_count = ds.records.size();
    for (const auto& rec : ds.records)
        if (rec.actual_defective) ++s.defective_count;
    s.defective_pct = s.module_count == 0
                          ? 0.0
                          : 100.0 * static_cast<double>(s.defective_count) /
                                static_cast<double>(s.module_count);
    return s;
}

std::vector<Finding> validate_dataset(const ProjectDataset& ds) {
    std::vector<Finding> findings;

    std::unordered_map<std::string, std::size_t> id_count;
    for (const auto& rec : ds.records) ++id_count[rec.id];
    std::set<std::string> dup_ids;
    for (const auto& [id, n] : id_count)
        if (n > 1) dup_ids.insert(id);
    for (const auto& id : dup_ids)
        findings.push_back({FindingKind::DuplicateId,
                            "id '" + id + "' appears " + std::to_string(id_count[id]) + " times"});

    const std::size_t d = ds.schema.dimension();
    for (std::size_t j = 0; j < d; ++j) {
        bool constant = ds.records.size() > 1;
        for (std::size_t i = 1; i < ds.records.size() && constant; ++i)
            constant = ds.records[i].features[j] == ds.records[0].features[j];
        if (constant && ds.records.size() > 1)
            findings.push_back({FindingKind::ConstantColumn,
                                "column '" + ds.schema.metric_names[j] + "' is constant"});
    }

    for (const auto& rec : ds.records)
        for (std::size_t j = 0; j < rec.features.size(); ++j)
            if (!std::isfinite(rec.features[j]))
                findings.push_back({FindingKind::NonFinite,
                                    "record '" + rec.id + "' column '" +
                                        ds.schema.metric_names[j] + "' is not finite"});

    return findings;
}

}  // namespace defectsim
