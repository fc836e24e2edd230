#include "lrsa/bands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "lrsa/mathx.hpp"
#include "lrsa/tsv.hpp"

namespace lrsa {

namespace {

constexpr double kTimeTol = 1e-9;

std::vector<double> union_grid(const GeneFit& fit) {
    std::vector<double> ts;
    for (const auto& s : fit.fitted) ts.push_back(s.t);
    for (double t : fit.obs_times) ts.push_back(t);
    std::sort(ts.begin(), ts.end());
    std::vector<double> out;
    for (double t : ts) {
        if (out.empty() || t - out.back() > kTimeTol) out.push_back(t);
    }
    return out;
}

double tricube_w(double u) {
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

}  // namespace

double VarianceProfile::sigma_at(double t) const {
    for (const auto& s : sigma_hat) {
        if (std::fabs(s.t - t) <= kTimeTol) return s.value;
    }
    fail(ErrorCategory::validation, "variance profile does not cover t=" + format_value(t));
}

const BandInterval& BandSet::at_time(double t) const {
    for (const auto& iv : intervals) {
        if (std::fabs(iv.t - t) <= kTimeTol) return iv;
    }
    fail(ErrorCategory::validation, "band does not cover t=" + format_value(t));
}

bool BandSet::covers_time(double t) const {
    for (const auto& iv : intervals) {
        if (std::fabs(iv.t - t) <= kTimeTol) return true;
    }
    return false;
}

VarianceProfile estimate_variance(const GeneFit& fit, const ConsolidatedSeries& series,
                                  double floor) {
    const std::size_t n = fit.residuals.size();
    if (n < 2) fail(ErrorCategory::validation, "variance estimation needs >= 2 residuals (" + fit.probe_id + ")");
    if (!(floor > 0.0)) fail(ErrorCategory::validation, "variance floor must be positive");
    if (series.size() != n) {
        fail(ErrorCategory::validation, "fit and series disagree on the observation count (" + fit.probe_id + ")");
    }

    std::vector<double> rt(n), r2(n);
    for (std::size_t j = 0; j < n; ++j) {
        rt[j] = fit.residuals[j].t;
        r2[j] = fit.residuals[j].value * fit.residuals[j].value;
    }

    const double dn = static_cast<double>(n);
    const double dof = dn - 2.0 * fit.hat_trace + fit.hat_trace2;
    if (!(dof > 0.0)) {
        fail(ErrorCategory::numeric, "degenerate residual degrees of freedom for " + fit.probe_id);
    }
    const double correction = dn / dof;

    // residual covariance shape M = (I - L)(I - L)', for the effective df
    std::vector<std::vector<double>> hat_rows(n);
    for (std::size_t j = 0; j < n; ++j) hat_rows[j] = fit.hat_at(rt[j]);
    std::vector<double> m(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = j; l < n; ++l) {
            double v = (j == l ? 1.0 : 0.0) - hat_rows[j][l] - hat_rows[l][j];
            for (std::size_t q = 0; q < n; ++q) v += hat_rows[j][q] * hat_rows[l][q];
            m[j * n + l] = v;
            m[l * n + j] = v;
        }
    }

    // nearest-neighbour window at the gene's own bandwidth, degree-0 smooth
    std::size_t k = static_cast<std::size_t>(std::ceil(fit.bandwidth * dn));
    k = std::min(std::max<std::size_t>(k, 1), n);

    std::vector<double> w(n);
    auto window_at = [&](double t0) {
        std::vector<double> d(n);
        for (std::size_t j = 0; j < n; ++j) d[j] = std::fabs(rt[j] - t0);
        std::vector<double> ds = d;
        std::nth_element(ds.begin(), ds.begin() + (k - 1), ds.end());
        const double h = ds[k - 1];

        std::fill(w.begin(), w.end(), 0.0);
        double wsum = 0.0;
        if (h > 0.0) {
            for (std::size_t j = 0; j < n; ++j) {
                if (d[j] < h) {
                    w[j] = tricube_w(d[j] / h);
                    wsum += w[j];
                }
            }
        }
        if (wsum == 0.0) {
            // all weight collapsed onto the k-th neighbour distance; average the ties
            const double dmin = *std::min_element(d.begin(), d.end());
            for (std::size_t j = 0; j < n; ++j) {
                if (d[j] <= dmin + kTimeTol) {
                    w[j] = 1.0;
                    wsum += 1.0;
                }
            }
        }
        return wsum;
    };

    VarianceProfile out;
    out.floor = floor;
    double inv_df_sum = 0.0;
    std::size_t df_points = 0;
    for (double t : union_grid(fit)) {
        const double wsum = window_at(t);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += w[j] * r2[j];
        const double var = correction * acc / wsum;
        out.sigma_hat.push_back({t, std::max(std::sqrt(std::max(var, 0.0)), floor)});

        // pointwise Satterthwaite df of the weighted mean of squared
        // residuals: (sum_j w_j M_jj)^2 / (sum_jl w_j w_l M_jl^2)
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (w[j] == 0.0) continue;
            num += w[j] * m[j * n + j];
            for (std::size_t l = 0; l < n; ++l) {
                if (w[l] == 0.0) continue;
                den += w[j] * w[l] * m[j * n + l] * m[j * n + l];
            }
        }
        if (den > 0.0) {
            inv_df_sum += den / (num * num);
            ++df_points;
        }
    }
    // harmonic mean along the curve: low-df stretches dominate, which is
    // where the t tail correction matters
    if (df_points > 0 && inv_df_sum > 0.0) {
        out.df_effective = static_cast<double>(df_points) / inv_df_sum;
    }
    return out;
}

std::vector<double> default_tube_grid(const GeneFit& fit, std::size_t n_points) {
    const auto [lo, hi] = std::minmax_element(fit.obs_times.begin(), fit.obs_times.end());
    return equispaced_grid(*lo, *hi, n_points);
}

double polygonal_path_length(const std::vector<std::vector<double>>& path) {
    if (path.size() < 2) fail(ErrorCategory::validation, "path length needs >= 2 points");
    double length = 0.0;
    for (std::size_t g = 1; g < path.size(); ++g) {
        if (path[g].size() != path[g - 1].size()) {
            fail(ErrorCategory::validation, "path points have mismatched dimensions");
        }
        double step2 = 0.0;
        for (std::size_t j = 0; j < path[g].size(); ++j) {
            const double dv = path[g][j] - path[g - 1][j];
            step2 += dv * dv;
        }
        length += std::sqrt(step2);
    }
    return length;
}

double tube_length(const GeneFit& fit, const std::vector<double>& grid) {
    if (grid.size() < 2) fail(ErrorCategory::validation, "tube grid needs >= 2 points");
    const ConsolidatedSeries series = fit.as_series();

    std::vector<std::vector<double>> path;
    path.reserve(grid.size());
    for (double t : grid) {
        LocalFitPoint lf = local_fit_at(series, t, fit.bandwidth);
        const double norm = lf.hat_norm();
        if (!(norm > 0.0)) {
            fail(ErrorCategory::numeric, "zero-norm hat vector at t=" + format_value(t) +
                 " for " + fit.probe_id);
        }
        for (double& v : lf.hat) v /= norm;
        path.push_back(std::move(lf.hat));
    }
    return polygonal_path_length(path);
}

namespace {

double bisect_tube(const std::function<double(double)>& lhs, double alpha, double hi_limit) {
    double lo = 0.0, hi = hi_limit;
    if (lhs(lo) <= alpha) {
        fail(ErrorCategory::numeric, "alpha=" + format_value(alpha) + " too large for the tube bound");
    }
    if (lhs(hi) > alpha) {
        fail(ErrorCategory::numeric, "alpha=" + format_value(alpha) + " too small: c exceeds " +
             format_value(hi_limit));
    }
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        if (lhs(mid) > alpha) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double student_t_sf(double c, double df) {
    if (c <= 0.0) return 0.5;
    return 0.5 * incomplete_beta(df / 2.0, 0.5, df / (df + c * c));
}

}  // namespace

double critical_value(double kappa0, double alpha) {
    if (!(kappa0 >= 0.0)) fail(ErrorCategory::validation, "tube length must be >= 0");
    if (!(alpha > 0.0) || alpha >= 1.0) fail(ErrorCategory::validation, "alpha must lie in (0, 1)");
    return bisect_tube(
        [kappa0](double c) {
            return kappa0 / M_PI * std::exp(-0.5 * c * c) + 2.0 * (1.0 - normal_cdf(c));
        },
        alpha, 10.0);
}

double critical_value_t(double kappa0, double alpha, double df) {
    if (!(kappa0 >= 0.0)) fail(ErrorCategory::validation, "tube length must be >= 0");
    if (!(alpha > 0.0) || alpha >= 1.0) fail(ErrorCategory::validation, "alpha must lie in (0, 1)");
    if (!(df > 0.0)) fail(ErrorCategory::validation, "degrees of freedom must be positive");
    return bisect_tube(
        [kappa0, df](double c) {
            return kappa0 / M_PI * std::pow(1.0 + c * c / df, -df / 2.0) + 2.0 * student_t_sf(c, df);
        },
        alpha, 200.0);
}

double residual_df(const GeneFit& fit) {
    const double df = static_cast<double>(fit.n_obs()) - 2.0 * fit.hat_trace + fit.hat_trace2;
    if (!(df > 0.0)) {
        fail(ErrorCategory::numeric, "degenerate residual degrees of freedom for " + fit.probe_id);
    }
    return df;
}

BandSet assemble_band(const GeneFit& fit, const VarianceProfile& var, double level, double kappa0) {
    if (!(level > 0.0) || level >= 1.0) fail(ErrorCategory::validation, "band level must lie in (0, 1)");
    const double df = var.df_effective > 0.0 ? var.df_effective : residual_df(fit);
    const double c = critical_value_t(kappa0, 1.0 - level, df);

    const ConsolidatedSeries series = fit.as_series();
    BandSet out;
    out.level = level;
    out.critical_value = c;
    out.kappa0 = kappa0;
    for (const auto& s : var.sigma_hat) {
        LocalFitPoint lf = local_fit_at(series, s.t, fit.bandwidth);
        const double half = c * s.value * lf.hat_norm();
        out.intervals.push_back({s.t, lf.value, lf.value - half, lf.value + half});
    }
    return out;
}

BandSet simultaneous_band(const GeneFit& fit, const VarianceProfile& var, double level) {
    return assemble_band(fit, var, level, tube_length(fit, default_tube_grid(fit)));
}

double multiplicity_level(double alpha, std::size_t m) {
    if (m < 1) fail(ErrorCategory::validation, "multiplicity m must be >= 1");
    if (!(alpha > 0.0) || alpha >= 1.0) fail(ErrorCategory::validation, "alpha must lie in (0, 1)");
    return 1.0 - alpha / static_cast<double>(m);
}

void widen_to_anchor_max(BandSet& band, const GeneFit& fit, const std::vector<double>& anchor_times) {
    if (anchor_times.empty()) fail(ErrorCategory::validation, "sparse band needs at least one anchor time");
    for (double a : anchor_times) {
        std::set<std::string> bios;
        bool present = false;
        for (std::size_t j = 0; j < fit.obs_times.size(); ++j) {
            if (std::fabs(fit.obs_times[j] - a) <= kTimeTol) {
                present = true;
                if (j < fit.obs_bio.size()) bios.insert(fit.obs_bio[j]);
            }
        }
        if (!present) {
            fail(ErrorCategory::validation, "anchor time " + format_value(a) + " absent from the design");
        }
        if (bios.size() < 2) {
            fail(ErrorCategory::validation, "anchor time " + format_value(a) +
                 " has fewer than 2 biological replicates");
        }
    }

    double widest = 0.0;
    for (double a : anchor_times) widest = std::max(widest, band.at_time(a).half_width());

    auto is_anchor = [&](double t) {
        for (double a : anchor_times) {
            if (std::fabs(t - a) <= kTimeTol) return true;
        }
        return false;
    };
    for (auto& iv : band.intervals) {
        if (is_anchor(iv.t)) continue;
        iv.lower = iv.fit - widest;
        iv.upper = iv.fit + widest;
    }
}

BandSet sparse_replicate_band(const GeneFit& fit, const VarianceProfile& var, double level,
                              const std::vector<double>& anchor_times) {
    BandSet band = simultaneous_band(fit, var, level);
    widen_to_anchor_max(band, fit, anchor_times);
    return band;
}

}
