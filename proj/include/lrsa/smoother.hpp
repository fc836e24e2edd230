#pragma once

// Per-gene local quadratic regression with tricube weights, nearest-neighbor
// bandwidths, hat-vector extraction, and GCV-driven bandwidth selection.
// The fitted value at t0 is always l(t0)' s for an explicit weight vector
// l(t0), so confidence-band geometry can reuse the same machinery.

#include <string>
#include <vector>

#include "lrsa/dataset.hpp"

namespace lrsa {

struct LocalFitConfig {
    int degree = 2;  // quadratic basis; degree-1 fallback happens per point when needed
    std::vector<double> bandwidth_grid = {0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> eval_grid;  // empty = 31 equispaced points over the design range

    // bandwidth selection also requires each fraction to stay well-posed on
    // this many fine-grid points, so the tube/band stage cannot degenerate;
    // 0 skips the check for fits that will never feed a band
    std::size_t tube_check_points = 301;

    void validate() const;
    std::vector<double> resolved_eval_grid(double t_min, double t_max) const;
};

std::vector<double> equispaced_grid(double t_min, double t_max, std::size_t n_points);

struct LocalFitPoint {
    double value = 0.0;
    std::vector<double> hat;  // length n over all observations, zeros outside the window
    int degree_used = 2;

    double hat_norm() const;
};

// Weighted least squares at t0 against {1, (t-t0), (t-t0)^2}. Tricube weights
// w_j = (1 - |t_j-t0|^3/h^3)^3 inside h = distance to the ceil(fraction*n)-th
// nearest observation. Falls back to a local line when fewer than 3 distinct
// times carry weight; with fewer than 2 the local design is singular.
LocalFitPoint local_fit_at(const ConsolidatedSeries& series, double t0, double bandwidth_fraction);

// n * RSS / (n - tr L)^2 with L the hat matrix stacked at the observed times.
// Returns +infinity when tr L reaches n (oversmoothing degeneracy).
double gcv_score(const ConsolidatedSeries& series, double bandwidth_fraction);

struct FitSample {
    double t = 0.0;
    double value = 0.0;
};

struct GeneFit {
    std::string probe_id;
    double bandwidth = 1.0;  // chosen nearest-neighbor fraction
    double gcv = 0.0;
    std::vector<FitSample> fitted;       // on the evaluation grid
    std::vector<FitSample> l_norm;       // ||l(t)|| on the evaluation grid
    std::vector<FitSample> fitted_obs;   // at the observed points
    std::vector<FitSample> l_norm_obs;
    std::vector<FitSample> residuals;    // at the observed points
    double hat_trace = 0.0;              // tr L
    double hat_trace2 = 0.0;             // tr L'L
    bool used_degree_fallback = false;

    // observed design kept so hat vectors can be reproduced at any t
    std::vector<double> obs_times;
    std::vector<double> obs_values;
    std::vector<std::string> obs_bio;

    ConsolidatedSeries as_series() const;
    double fitted_at(double t) const;      // recomputed, exact for grid points too
    double l_norm_at(double t) const;
    std::vector<double> hat_at(double t) const;
    std::size_t n_obs() const { return obs_times.size(); }
    std::vector<double> distinct_obs_times() const;
};

// Minimizes GCV over the bandwidth grid (smallest fraction wins ties) and
// evaluates the winner on the grid and at the observed points.
GeneFit select_bandwidth(const ConsolidatedSeries& series, const LocalFitConfig& cfg);

}
