#pragma once

// The full per-gene analysis chain (fit -> variance -> tube length) and the
// DE-calling stage that reuses it at any coverage level. The expensive first
// stage runs as a deterministic parallel map over genes; aggregation is a
// serial reduction ordered by input row.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lrsa/anova.hpp"
#include "lrsa/bands.hpp"
#include "lrsa/dataset.hpp"
#include "lrsa/decaller.hpp"
#include "lrsa/parallel.hpp"
#include "lrsa/smoother.hpp"

namespace lrsa {

enum class Correction { none, time_points, genes };

const char* to_string(Correction c);
Correction parse_correction(const std::string& text);

struct FitBundle {
    GeneFit fit;
    VarianceProfile var;
    double kappa0 = 0.0;
};

// Fit + variance + tube length for every series, in input order.
std::vector<FitBundle> fit_genes(const std::vector<ConsolidatedSeries>& series,
                                 const LocalFitConfig& cfg, ExecMode mode,
                                 double variance_floor = 1e-6);

struct CallSettings {
    double alpha = 0.05;
    double fold_threshold = 2.0;
    Correction correction = Correction::none;
    DECriterion criterion = DECriterion::band_disjoint;
    bool sparse_band_mode = false;
    std::vector<double> anchor_times = {0.0, 14.0};

    // m for the Bonferroni-type level, from the loaded data
    std::size_t multiplicity_m(std::size_t n_time_points, std::size_t n_genes) const;
};

struct CallOutcome {
    std::vector<DECall> calls;  // aligned with the bundles
    double band_level = 0.95;
    FdrEcResult fdr;
    std::optional<EnrichmentResult> enrichment;  // absent when a table margin is empty

    std::set<std::string> de_ids() const;
};

// Bands + calls at the settings' coverage level, then the report reduction.
CallOutcome call_genes(const std::vector<FitBundle>& bundles,
                       const std::vector<ProbeAnnotation>& annotations,
                       const CallSettings& settings, ExecMode mode);

// The ANOVA side of the comparison, same parallel map shape.
std::vector<AnovaResult> anova_genes(const std::vector<ConsolidatedSeries>& series, ExecMode mode,
                                     bool adjust);

}
