#pragma once

// Differential-expression calling against the t=0 control, the external-
// control FDR surrogate, Fisher's exact enrichment test, and the report
// metrics (prediction accuracy, real-vs-simulated overlap).

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lrsa/bands.hpp"
#include "lrsa/dataset.hpp"

namespace lrsa {

enum class Direction { up, down, none };

const char* to_string(Direction d);

// How criterion (a) of the DE rule is evaluated. The default requires the
// bands at t_k and t=0 to be disjoint; the alternative only requires the
// band at t_k to exclude the fitted control value.
enum class DECriterion { band_disjoint, band_excludes_control };

struct DECall {
    std::string probe_id;
    bool is_de = false;
    std::optional<double> trigger_time;
    double log2_delta = 0.0;  // f(trigger) - f(0)
    Direction direction = Direction::none;
};

// DE iff some design time t_k > 0 passes the significance criterion and
// |f(t_k) - f(0)| >= log2(fold_threshold); the trigger is the qualifying
// time with the largest |delta|.
DECall call_de(const GeneFit& fit, const BandSet& band, double fold_threshold,
               const std::vector<double>& design_times,
               DECriterion criterion = DECriterion::band_disjoint);

struct FdrEcResult {
    double fdr_ec = 0.0;
    std::size_t n_ec_de = 0;
    std::size_t n_total_de = 0;
    bool no_calls = false;  // warning flag: N_T,DE was zero
};

// FDR_EC = N_EC,DE / N_T,DE over every call (targets and controls alike).
FdrEcResult fdr_ec(const std::vector<DECall>& calls, const std::vector<ProbeAnnotation>& annotations);

struct EnrichmentResult {
    double odds_ratio = 0.0;
    double p_value = 1.0;
    // the (EC vs target) x (DE vs not) table behind the numbers
    std::size_t a = 0, b = 0, c = 0, d = 0;
};

// Sample odds ratio (a/b)/(c/d), zero when a=0, and the two-sided Fisher
// exact p (sum of hypergeometric probabilities <= the observed table's).
EnrichmentResult control_enrichment(const std::vector<DECall>& calls,
                                    const std::vector<ProbeAnnotation>& annotations);

// Exposed directly for report assembly and tests.
double fisher_exact_two_sided(std::size_t a, std::size_t b, std::size_t c, std::size_t d);

// (hits among known + hits among verified) / (|known| + |verified|) * 100.
double prediction_accuracy(const std::set<std::string>& calls,
                           const std::vector<std::string>& known_genes,
                           const std::vector<std::string>& verified_genes);

// |real and sim| / |real| * 100; zero when real is empty.
double overlap_percent(const std::set<std::string>& real_calls, const std::set<std::string>& sim_calls);

}
