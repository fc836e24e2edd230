#pragma once

// Comparison baseline: per-gene quadratic-regression F test over time,
// Benjamini-Hochberg adjustment, and threshold-based calling.

#include <set>
#include <string>
#include <vector>

#include "lrsa/dataset.hpp"

namespace lrsa {

struct AnovaResult {
    std::string probe_id;
    double f_statistic = 0.0;
    double p_value = 1.0;
    double p_adjusted = 1.0;
    double max_abs_log2_delta = 0.0;  // largest |group mean(t_k) - group mean(0)| over t_k > 0
};

// OLS of value on {1, t, t^2} against the intercept-only null;
// F = ((RSS0 - RSS1)/2) / (RSS1/(n-3)), p from F(2, n-3).
AnovaResult anova_fit(const ConsolidatedSeries& series);

// Step-up BH: sort ascending, q_(i) = min_{j>=i} p_(j) m / j, clipped at 1.
std::vector<double> bh_adjust(const std::vector<double>& p_values);

// Applies BH across the batch and fills p_adjusted in place.
void bh_adjust_in_place(std::vector<AnovaResult>& results);

// DE iff (adjust ? p_adjusted : p_value) <= alpha and
// max_abs_log2_delta >= log2(fold_threshold).
std::set<std::string> anova_call(const std::vector<AnovaResult>& results, double alpha,
                                 double fold_threshold, bool adjust);

}
