#pragma once

// Synthetic experiment generator: planted DE target genes with smooth
// temporal patterns, null targets, and null external controls, plus the
// power/FDR scoring used to evaluate callers against the planted truth.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lrsa/dataset.hpp"

namespace lrsa {

enum class Pattern { single_peak, monotone, cyclic };

const char* to_string(Pattern p);

struct SimSpec {
    std::size_t n_targets = 2000;
    std::size_t n_controls = 200;
    double de_fraction = 0.1;
    std::vector<double> design_times = {0.0, 1.0, 3.0, 7.0, 14.0, 30.0};
    std::vector<int> replicates_per_time = {3, 3, 2, 3, 3, 1};  // biological replicates
    std::vector<double> noise_sd = {0.3};  // one value = homoscedastic, else per time
    double weight_single_peak = 1.0;
    double weight_monotone = 1.0;
    double weight_cyclic = 1.0;
    double peak_log2_amplitude = 2.0;
    std::uint64_t seed = 1;

    void validate() const;
    double sd_at(std::size_t time_index) const;
};

struct SimTruth {
    std::set<std::string> de_ids;
    std::map<std::string, Pattern> pattern_of;
    std::map<std::string, std::vector<double>> true_curves;  // values at the design times
};

struct SimResult {
    ExperimentMatrix matrix;
    SimTruth truth;
};

// DE targets follow a smooth pattern whose peak deviation from baseline is
// exactly peak_log2_amplitude (and whose value at t=0 is the baseline);
// every other probe is a constant baseline. Additive Gaussian noise, fully
// reproducible from the seed.
SimResult generate(const SimSpec& spec);

struct RunScore {
    double power = 0.0;
    double true_fdr = 0.0;
};

RunScore score_run(const SimTruth& truth, const std::set<std::string>& calls);

}
