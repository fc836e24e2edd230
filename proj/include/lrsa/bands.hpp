#pragma once

// Simultaneous confidence bands around a local-regression fit: a kernel
// variance estimate with a degrees-of-freedom correction, the tube-formula
// critical value, interval assembly, Bonferroni-type coverage levels, and
// the wider anchor-width bands used when most times have one replicate.

#include <vector>

#include "lrsa/smoother.hpp"

namespace lrsa {

struct VarianceProfile {
    std::vector<FitSample> sigma_hat;  // sigma(t) in log2 units, floored
    double floor = 1e-6;
    // Satterthwaite effective degrees of freedom of the weighted variance
    // estimate, minimized over the profile grid; drives the t-tube width.
    double df_effective = 0.0;

    double sigma_at(double t) const;
};

struct BandInterval {
    double t = 0.0;
    double fit = 0.0;
    double lower = 0.0;
    double upper = 0.0;

    double half_width() const { return 0.5 * (upper - lower); }
};

struct BandSet {
    double level = 0.95;          // simultaneous coverage
    double critical_value = 0.0;  // c
    double kappa0 = 0.0;          // tube length
    std::vector<BandInterval> intervals;

    const BandInterval& at_time(double t) const;
    bool covers_time(double t) const;
};

// Kernel-weighted mean of squared residuals at the gene's chosen bandwidth,
// rescaled by n / (n - 2 tr L + tr L'L) and floored. Evaluated on the union
// of the observed times and the fit's evaluation grid.
VarianceProfile estimate_variance(const GeneFit& fit, const ConsolidatedSeries& series,
                                  double floor = 1e-6);

// Sum of chord lengths along a discretized path in R^n.
double polygonal_path_length(const std::vector<std::vector<double>>& path);

// Polygonal length of t -> l(t)/||l(t)|| along the grid.
double tube_length(const GeneFit& fit, const std::vector<double>& grid);

// Default tube grid: 301 equispaced points over the observed design range.
std::vector<double> default_tube_grid(const GeneFit& fit, std::size_t n_points = 301);

// Root c > 0 of (kappa0/pi) exp(-c^2/2) + 2 (1 - Phi(c)) = alpha, by
// bisection on [0, 10] to 1e-8. Gaussian reference form.
double critical_value(double kappa0, double alpha);

// Student-t tube variant with df residual degrees of freedom:
// (kappa0/pi) (1 + c^2/df)^(-df/2) + 2 (1 - F_t(c; df)) = alpha.
// Bands are built from this one; with the designs here (6-15 points) the
// Gaussian form undercovers badly because sigma is estimated.
double critical_value_t(double kappa0, double alpha, double df);

// Residual degrees of freedom of the fit: n - 2 tr L + tr L'L.
double residual_df(const GeneFit& fit);

// f(t) +/- c sigma(t) ||l(t)|| on the variance profile's grid.
BandSet simultaneous_band(const GeneFit& fit, const VarianceProfile& var, double level);

// Same band when the tube length is already known (the per-gene pipeline
// caches it across coverage levels).
BandSet assemble_band(const GeneFit& fit, const VarianceProfile& var, double level, double kappa0);

// In-place sparse-replicate widening: validates the anchors and replaces
// every non-anchor half-width with the widest anchor half-width.
void widen_to_anchor_max(BandSet& band, const GeneFit& fit, const std::vector<double>& anchor_times);

// 1 - alpha/m, the Bonferroni-type per-band coverage level.
double multiplicity_level(double alpha, std::size_t m);

// Band whose half-width away from the anchor times is the widest anchor
// half-width; anchors keep their own widths. Each anchor needs >= 2
// biological replicates.
BandSet sparse_replicate_band(const GeneFit& fit, const VarianceProfile& var, double level,
                              const std::vector<double>& anchor_times);

}
