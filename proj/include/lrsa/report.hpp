#pragma once

// File outputs behind the CLI: gene-fit tables, per-gene band CSVs, call
// tables with their JSON summaries, cluster outputs, and the side-by-side
// comparison table. Display rounding follows the report convention
// (FDR_EC to 3 decimals, odds ratio to 1 decimal, p to 1 significant
// figure); JSON always carries the raw values.

#include <string>
#include <vector>

#include <json.hpp>

#include "lrsa/pipeline.hpp"
#include "lrsa/spectral.hpp"

namespace lrsa {

std::string display_fdr(double fdr);
std::string display_odds_ratio(double odds_ratio);
std::string display_p(double p);

void write_fits_tsv(const std::vector<FitBundle>& bundles, const std::string& path);
void write_band_csv(const BandSet& band, const std::string& path);

void write_calls_tsv(const CallOutcome& outcome, const std::vector<ProbeAnnotation>& annotations,
                     const std::string& path);

// counts, FDR_EC, enrichment, and the resolved settings block
nlohmann::json call_summary_json(const CallOutcome& outcome, const CallSettings& settings,
                                 const nlohmann::json& resolved_config);

void write_anova_tsv(const std::vector<AnovaResult>& results, const std::set<std::string>& de_calls,
                     const std::string& path);

void write_labels_tsv(const ClusterResult& clusters, const std::string& path);
void write_median_csv(const std::vector<FitSample>& pattern, const std::string& path);

struct CompareRow {
    std::string method;      // "lrsa" | "anova"
    std::string correction;  // "none" | "time_points" | "genes"
    double fold_threshold = 2.0;
    std::size_t n_de = 0;
    std::size_t n_ec_de = 0;
    double fdr_ec = 0.0;
    bool enrichment_defined = false;
    double odds_ratio = 0.0;
    double fisher_p = 1.0;
    bool overlap_defined = false;
    double overlap_pct = 0.0;
    bool accuracy_defined = false;
    double accuracy_pct = 0.0;
};

void write_compare_tsv(const std::vector<CompareRow>& rows, const std::string& path);
nlohmann::json compare_summary_json(const std::vector<CompareRow>& rows,
                                    const nlohmann::json& resolved_config);

}
