#pragma once

// Expression-matrix ingestion: TSV loading with cell-level validation,
// technical-replicate merging, and the replicate subsampling used to build
// parsimonious designs. Values are log2 intensities throughout.

#include <cstdint>
#include <string>
#include <vector>

#include "lrsa/error.hpp"

namespace lrsa {

enum class ProbeRole { target, positive_control, negative_control };

const char* to_string(ProbeRole role);
ProbeRole parse_probe_role(const std::string& text);

inline bool is_external_control(ProbeRole role) { return role != ProbeRole::target; }

struct SampleMeta {
    std::string array_id;
    double time_days = 0.0;
    std::string biological_replicate;
    int technical_replicate_index = 1;
};

struct ProbeAnnotation {
    std::string probe_id;
    ProbeRole role = ProbeRole::target;
};

// Dense probes x arrays matrix plus its two side tables. Column order always
// matches the sample sheet. Immutable after load; safe to share across
// threads.
struct ExperimentMatrix {
    std::vector<double> values;  // row-major, rows = probes
    std::vector<std::string> row_index;
    std::vector<std::string> col_index;
    std::vector<SampleMeta> meta;
    std::vector<ProbeAnnotation> annotations;

    std::size_t n_probes() const { return row_index.size(); }
    std::size_t n_arrays() const { return col_index.size(); }
    double at(std::size_t row, std::size_t col) const { return values[row * n_arrays() + col]; }
    ProbeRole role_of_row(std::size_t row) const { return annotations[row].role; }
};

struct SeriesPoint {
    double time_days = 0.0;
    double value = 0.0;
    std::string biological_replicate;
};

// One merged point per (probe, biological replicate), sorted by time.
struct ConsolidatedSeries {
    std::string probe_id;
    std::vector<SeriesPoint> points;

    std::vector<double> times() const;
    std::vector<double> values() const;
    std::vector<double> distinct_times() const;  // sorted
    std::size_t size() const { return points.size(); }
};

ExperimentMatrix load_experiment(const std::string& matrix_path,
                                 const std::string& samplesheet_path,
                                 const std::string& annotation_path);

// Averages technical replicates within each biological replicate:
// s_i = (sum_m s_{i,m}) / M. One output series per probe, matrix row order.
std::vector<ConsolidatedSeries> merge_technical_replicates(const ExperimentMatrix& m);

// Keeps one random technical replicate per biological replicate everywhere,
// and one random biological replicate per time except at the anchor times,
// where all biological replicates survive. Column order is preserved.
ExperimentMatrix subsample_for_simulation(const ExperimentMatrix& m, std::uint64_t seed,
                                          const std::vector<double>& anchor_times = {0.0, 14.0});

void write_matrix_tsv(const ExperimentMatrix& m, const std::string& path);
void write_samplesheet_tsv(const ExperimentMatrix& m, const std::string& path);
void write_annotation_tsv(const ExperimentMatrix& m, const std::string& path);

}
