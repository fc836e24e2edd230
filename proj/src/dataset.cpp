#include "lrsa/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lrsa/tsv.hpp"

namespace lrsa {

const char* to_string(ProbeRole role) {
    switch (role) {
        case ProbeRole::target: return "target";
        case ProbeRole::positive_control: return "positive_control";
        case ProbeRole::negative_control: return "negative_control";
    }
    return "target";
}

ProbeRole parse_probe_role(const std::string& text) {
    if (text == "target") return ProbeRole::target;
    if (text == "positive_control") return ProbeRole::positive_control;
    if (text == "negative_control") return ProbeRole::negative_control;
    fail(ErrorCategory::parse, "unknown probe role \"" + text + "\"");
}

std::vector<double> ConsolidatedSeries::times() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.time_days);
    return out;
}

std::vector<double> ConsolidatedSeries::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

std::vector<double> ConsolidatedSeries::distinct_times() const {
    std::vector<double> out = times();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

namespace {

void expect_header(const std::vector<std::string>& fields,
                   const std::vector<std::string>& expected, const std::string& path) {
    if (fields.size() < expected.size()) {
        fail(ErrorCategory::parse, path + ": header has " + std::to_string(fields.size()) +
             " columns, expected at least " + std::to_string(expected.size()));
    }
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (fields[i] != expected[i]) {
            fail(ErrorCategory::parse, path + ": header column " + std::to_string(i + 1) +
                 " is \"" + fields[i] + "\", expected \"" + expected[i] + "\"");
        }
    }
}

std::vector<SampleMeta> load_samplesheet(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty()) fail(ErrorCategory::parse, path + ": empty sample sheet");
    expect_header(split_tabs(lines[0]),
                  {"array_id", "time_days", "biological_replicate", "technical_replicate_index"}, path);

    std::vector<SampleMeta> out;
    std::unordered_set<std::string> seen_array;
    std::set<std::pair<std::string, int>> seen_bio_tech;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_tabs(lines[i]);
        if (f.size() != 4) {
            fail(ErrorCategory::parse, path + ": line " + std::to_string(i + 1) +
                 " has " + std::to_string(f.size()) + " columns, expected 4");
        }
        SampleMeta s;
        s.array_id = f[0];
        s.time_days = parse_number(f[1], path + " line " + std::to_string(i + 1) + " (time_days)");
        s.biological_replicate = f[2];
        s.technical_replicate_index = static_cast<int>(
            parse_integer(f[3], path + " line " + std::to_string(i + 1) + " (technical_replicate_index)"));
        if (s.time_days < 0.0) {
            fail(ErrorCategory::validation, path + ": negative time_days for array " + s.array_id);
        }
        if (s.technical_replicate_index < 1) {
            fail(ErrorCategory::validation, path + ": technical_replicate_index must be >= 1 for array " + s.array_id);
        }
        if (!seen_array.insert(s.array_id).second) {
            fail(ErrorCategory::validation, path + ": duplicate array_id \"" + s.array_id + "\"");
        }
        if (!seen_bio_tech.insert({s.biological_replicate, s.technical_replicate_index}).second) {
            fail(ErrorCategory::validation, path + ": duplicate (biological_replicate, technical_replicate_index) = (" +
                 s.biological_replicate + ", " + std::to_string(s.technical_replicate_index) + ")");
        }
        out.push_back(std::move(s));
    }
    if (out.empty()) fail(ErrorCategory::validation, path + ": sample sheet has no rows");

    // a biological replicate is one animal: it carries a single time
    std::unordered_map<std::string, double> bio_time;
    for (const auto& s : out) {
        auto it = bio_time.find(s.biological_replicate);
        if (it == bio_time.end()) {
            bio_time.emplace(s.biological_replicate, s.time_days);
        } else if (it->second != s.time_days) {
            fail(ErrorCategory::validation, path + ": biological replicate \"" + s.biological_replicate +
                 "\" appears at two different times");
        }
    }
    return out;
}

std::vector<ProbeAnnotation> load_annotations(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty()) fail(ErrorCategory::parse, path + ": empty annotation file");
    expect_header(split_tabs(lines[0]), {"probe_id", "role"}, path);
    std::vector<ProbeAnnotation> out;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_tabs(lines[i]);
        if (f.size() != 2) {
            fail(ErrorCategory::parse, path + ": line " + std::to_string(i + 1) +
                 " has " + std::to_string(f.size()) + " columns, expected 2");
        }
        if (!seen.insert(f[0]).second) {
            fail(ErrorCategory::validation, path + ": duplicate probe_id \"" + f[0] + "\"");
        }
        out.push_back({f[0], parse_probe_role(f[1])});
    }
    return out;
}

}  // namespace

ExperimentMatrix load_experiment(const std::string& matrix_path,
                                 const std::string& samplesheet_path,
                                 const std::string& annotation_path) {
    auto meta = load_samplesheet(samplesheet_path);
    auto annotations = load_annotations(annotation_path);

    auto lines = read_lines(matrix_path);
    if (lines.empty()) fail(ErrorCategory::parse, matrix_path + ": empty matrix file");
    auto header = split_tabs(lines[0]);
    if (header.empty() || header[0] != "probe_id") {
        fail(ErrorCategory::parse, matrix_path + ": first header cell must be \"probe_id\"");
    }

    // map matrix columns onto sample-sheet order
    std::unordered_map<std::string, std::size_t> matrix_col;
    for (std::size_t c = 1; c < header.size(); ++c) {
        if (!matrix_col.emplace(header[c], c - 1).second) {
            fail(ErrorCategory::validation, matrix_path + ": duplicate array_id \"" + header[c] + "\" in header");
        }
    }
    if (matrix_col.size() != meta.size()) {
        fail(ErrorCategory::validation, matrix_path + ": matrix has " + std::to_string(matrix_col.size()) +
             " arrays but sample sheet has " + std::to_string(meta.size()));
    }
    std::vector<std::size_t> col_order(meta.size());
    for (std::size_t i = 0; i < meta.size(); ++i) {
        auto it = matrix_col.find(meta[i].array_id);
        if (it == matrix_col.end()) {
            fail(ErrorCategory::validation, matrix_path + ": array \"" + meta[i].array_id +
                 "\" from the sample sheet is missing from the matrix header");
        }
        col_order[i] = it->second;
    }

    ExperimentMatrix m;
    m.meta = std::move(meta);
    for (const auto& s : m.meta) m.col_index.push_back(s.array_id);

    const std::size_t n_arrays = m.col_index.size();
    std::unordered_set<std::string> seen_probe;
    std::vector<double> raw_row(n_arrays);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto f = split_tabs(lines[i]);
        if (f.size() != n_arrays + 1) {
            fail(ErrorCategory::parse, matrix_path + ": probe row " + std::to_string(i + 1) + " has " +
                 std::to_string(f.size() - 1) + " values, expected " + std::to_string(n_arrays));
        }
        const std::string& probe = f[0];
        if (!seen_probe.insert(probe).second) {
            fail(ErrorCategory::validation, matrix_path + ": duplicate probe_id \"" + probe + "\"");
        }
        for (std::size_t c = 0; c < n_arrays; ++c) {
            raw_row[c] = parse_number(f[c + 1], "probe " + probe + ", array " + header[c + 1]);
        }
        m.row_index.push_back(probe);
        for (std::size_t c = 0; c < n_arrays; ++c) m.values.push_back(raw_row[col_order[c]]);
    }
    if (m.row_index.empty()) fail(ErrorCategory::validation, matrix_path + ": matrix has no probe rows");

    // align annotations to matrix row order; every row needs exactly one
    std::unordered_map<std::string, ProbeRole> role_of;
    for (const auto& a : annotations) role_of.emplace(a.probe_id, a.role);
    for (const auto& probe : m.row_index) {
        auto it = role_of.find(probe);
        if (it == role_of.end()) {
            fail(ErrorCategory::validation, annotation_path + ": probe \"" + probe + "\" has no annotation");
        }
        m.annotations.push_back({probe, it->second});
    }
    return m;
}

std::vector<ConsolidatedSeries> merge_technical_replicates(const ExperimentMatrix& m) {
    // stable list of biological replicates with their member columns
    struct BioGroup {
        std::string bio_id;
        double time = 0.0;
        std::vector<std::size_t> columns;
    };
    std::vector<BioGroup> groups;
    std::unordered_map<std::string, std::size_t> group_of;
    for (std::size_t c = 0; c < m.meta.size(); ++c) {
        const auto& s = m.meta[c];
        auto it = group_of.find(s.biological_replicate);
        if (it == group_of.end()) {
            group_of.emplace(s.biological_replicate, groups.size());
            groups.push_back({s.biological_replicate, s.time_days, {c}});
        } else {
            groups[it->second].columns.push_back(c);
        }
    }

    {
        std::set<double> distinct;
        for (const auto& g : groups) distinct.insert(g.time);
        if (distinct.size() < 2) {
            fail(ErrorCategory::validation, "merge requires at least two distinct time points");
        }
    }

    std::vector<ConsolidatedSeries> out(m.n_probes());
    for (std::size_t r = 0; r < m.n_probes(); ++r) {
        ConsolidatedSeries& series = out[r];
        series.probe_id = m.row_index[r];
        series.points.reserve(groups.size());
        for (const auto& g : groups) {
            double sum = 0.0;
            for (std::size_t c : g.columns) sum += m.at(r, c);
            series.points.push_back({g.time, sum / static_cast<double>(g.columns.size()), g.bio_id});
        }
        std::sort(series.points.begin(), series.points.end(), [](const SeriesPoint& a, const SeriesPoint& b) {
            if (a.time_days != b.time_days) return a.time_days < b.time_days;
            return a.biological_replicate < b.biological_replicate;
        });
    }
    return out;
}

ExperimentMatrix subsample_for_simulation(const ExperimentMatrix& m, std::uint64_t seed,
                                          const std::vector<double>& anchor_times) {
    // bio groups in first-appearance order, bucketed per time
    struct BioGroup {
        std::string bio_id;
        double time = 0.0;
        std::vector<std::size_t> columns;
    };
    std::vector<BioGroup> groups;
    std::unordered_map<std::string, std::size_t> group_of;
    for (std::size_t c = 0; c < m.meta.size(); ++c) {
        const auto& s = m.meta[c];
        auto it = group_of.find(s.biological_replicate);
        if (it == group_of.end()) {
            group_of.emplace(s.biological_replicate, groups.size());
            groups.push_back({s.biological_replicate, s.time_days, {c}});
        } else {
            groups[it->second].columns.push_back(c);
        }
    }

    std::map<double, std::vector<std::size_t>> groups_at_time;
    for (std::size_t g = 0; g < groups.size(); ++g) groups_at_time[groups[g].time].push_back(g);

    for (double anchor : anchor_times) {
        if (!groups_at_time.count(anchor)) {
            fail(ErrorCategory::validation, "anchor time " + format_value(anchor) + " absent from the design");
        }
    }
    auto is_anchor = [&](double t) {
        return std::find(anchor_times.begin(), anchor_times.end(), t) != anchor_times.end();
    };

    std::mt19937_64 rng(seed);
    auto pick = [&rng](std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    };

    // one technical replicate per biological replicate, everywhere;
    // draws happen in a fixed order so the selection is seed-reproducible
    std::vector<std::size_t> chosen_tech(groups.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        chosen_tech[g] = groups[g].columns[pick(groups[g].columns.size())];
    }

    std::set<std::size_t> kept_groups;
    for (const auto& [time, at_time] : groups_at_time) {
        if (is_anchor(time)) {
            kept_groups.insert(at_time.begin(), at_time.end());
        } else {
            kept_groups.insert(at_time[pick(at_time.size())]);
        }
    }

    std::vector<bool> keep_col(m.n_arrays(), false);
    for (std::size_t g : kept_groups) keep_col[chosen_tech[g]] = true;

    ExperimentMatrix out;
    out.row_index = m.row_index;
    out.annotations = m.annotations;
    for (std::size_t c = 0; c < m.n_arrays(); ++c) {
        if (!keep_col[c]) continue;
        out.col_index.push_back(m.col_index[c]);
        out.meta.push_back(m.meta[c]);
    }
    out.values.reserve(m.n_probes() * out.col_index.size());
    for (std::size_t r = 0; r < m.n_probes(); ++r) {
        for (std::size_t c = 0; c < m.n_arrays(); ++c) {
            if (keep_col[c]) out.values.push_back(m.at(r, c));
        }
    }
    return out;
}

void write_matrix_tsv(const ExperimentMatrix& m, const std::string& path) {
    std::ostringstream out;
    out << "probe_id";
    for (const auto& a : m.col_index) out << '\t' << a;
    out << '\n';
    for (std::size_t r = 0; r < m.n_probes(); ++r) {
        out << m.row_index[r];
        for (std::size_t c = 0; c < m.n_arrays(); ++c) out << '\t' << format_value(m.at(r, c));
        out << '\n';
    }
    write_text_file(path, out.str());
}

void write_samplesheet_tsv(const ExperimentMatrix& m, const std::string& path) {
    std::ostringstream out;
    out << "array_id\ttime_days\tbiological_replicate\ttechnical_replicate_index\n";
    for (const auto& s : m.meta) {
        out << s.array_id << '\t' << format_value(s.time_days) << '\t' << s.biological_replicate
            << '\t' << s.technical_replicate_index << '\n';
    }
    write_text_file(path, out.str());
}

void write_annotation_tsv(const ExperimentMatrix& m, const std::string& path) {
    std::ostringstream out;
    out << "probe_id\trole\n";
    for (const auto& a : m.annotations) out << a.probe_id << '\t' << to_string(a.role) << '\n';
    write_text_file(path, out.str());
}

}
