#include "lrsa/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "lrsa/mathx.hpp"
#include "lrsa/tsv.hpp"

namespace lrsa {

void LocalFitConfig::validate() const {
    if (degree != 2) fail(ErrorCategory::validation, "only the quadratic local fit is supported");
    if (bandwidth_grid.empty()) fail(ErrorCategory::validation, "bandwidth grid is empty");
    for (std::size_t i = 0; i < bandwidth_grid.size(); ++i) {
        double f = bandwidth_grid[i];
        if (!(f > 0.0) || f > 1.0) {
            fail(ErrorCategory::validation, "bandwidth fraction " + format_value(f) + " outside (0, 1]");
        }
        if (i > 0 && bandwidth_grid[i] <= bandwidth_grid[i - 1]) {
            fail(ErrorCategory::validation, "bandwidth grid must be strictly increasing");
        }
    }
}

std::vector<double> equispaced_grid(double t_min, double t_max, std::size_t n_points) {
    if (n_points < 2 || !(t_max > t_min)) {
        fail(ErrorCategory::validation, "evaluation grid needs >= 2 points over a positive range");
    }
    std::vector<double> grid(n_points);
    const double step = (t_max - t_min) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) grid[i] = t_min + step * static_cast<double>(i);
    grid.back() = t_max;
    return grid;
}

std::vector<double> LocalFitConfig::resolved_eval_grid(double t_min, double t_max) const {
    if (!eval_grid.empty()) return eval_grid;
    return equispaced_grid(t_min, t_max, 31);
}

double LocalFitPoint::hat_norm() const {
    double s = 0.0;
    for (double v : hat) s += v * v;
    return std::sqrt(s);
}

namespace {

// h = distance to the k-th nearest observation, k = ceil(fraction * n)
double nn_bandwidth(const std::vector<double>& times, double t0, double fraction) {
    std::vector<double> d(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) d[i] = std::fabs(times[i] - t0);
    std::size_t k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(times.size())));
    k = std::min(std::max<std::size_t>(k, 1), times.size());
    std::nth_element(d.begin(), d.begin() + (k - 1), d.end());
    return d[k - 1];
}

double tricube(double u) {
    const double t = 1.0 - u * u * u;
    return t * t * t;
}

}  // namespace

LocalFitPoint local_fit_at(const ConsolidatedSeries& series, double t0, double bandwidth_fraction) {
    const std::size_t n = series.size();
    if (n < 3) fail(ErrorCategory::validation, "series " + series.probe_id + " has fewer than 3 points");

    std::vector<double> times = series.times();
    std::vector<double> values = series.values();
    const double h = nn_bandwidth(times, t0, bandwidth_fraction);
    if (!(h > 0.0)) {
        fail(ErrorCategory::numeric, "singular local design at t0=" + format_value(t0) +
             " for " + series.probe_id + ": in-window times coincide");
    }

    std::vector<double> w(n, 0.0);
    std::vector<double> in_window_times;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = std::fabs(times[j] - t0);
        if (d < h) {
            w[j] = tricube(d / h);
            in_window_times.push_back(times[j]);
        }
    }
    std::sort(in_window_times.begin(), in_window_times.end());
    in_window_times.erase(std::unique(in_window_times.begin(), in_window_times.end()), in_window_times.end());

    if (in_window_times.size() < 2) {
        fail(ErrorCategory::numeric, "singular local design at t0=" + format_value(t0) +
             " for " + series.probe_id + ": all in-window times coincide");
    }

    // try the quadratic basis, then a local line if the window degenerates
    for (int degree = (in_window_times.size() >= 3 ? 2 : 1); degree >= 1; --degree) {
        const std::size_t p = static_cast<std::size_t>(degree) + 1;
        std::vector<double> m(p * p, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            if (w[j] == 0.0) continue;
            double x[3] = {1.0, times[j] - t0, (times[j] - t0) * (times[j] - t0)};
            for (std::size_t r = 0; r < p; ++r)
                for (std::size_t c = 0; c < p; ++c) m[r * p + c] += w[j] * x[r] * x[c];
        }
        std::vector<double> rhs(p, 0.0);
        rhs[0] = 1.0;
        if (!solve_dense(m, rhs, p)) continue;  // z = (X'WX)^{-1} e1

        LocalFitPoint out;
        out.degree_used = degree;
        out.hat.assign(n, 0.0);
        double fitted = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (w[j] == 0.0) continue;
            double x[3] = {1.0, times[j] - t0, (times[j] - t0) * (times[j] - t0)};
            double lj = 0.0;
            for (std::size_t r = 0; r < p; ++r) lj += rhs[r] * x[r];
            lj *= w[j];
            out.hat[j] = lj;
            fitted += lj * values[j];
        }
        out.value = fitted;
        return out;
    }

    fail(ErrorCategory::numeric, "singular local design at t0=" + format_value(t0) +
         " for " + series.probe_id);
}

double gcv_score(const ConsolidatedSeries& series, double bandwidth_fraction) {
    const std::size_t n = series.size();
    const std::vector<double> times = series.times();
    const std::vector<double> values = series.values();

    double trace = 0.0;
    double rss = 0.0;
    double scale = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        LocalFitPoint fit = local_fit_at(series, times[j], bandwidth_fraction);
        trace += fit.hat[j];
        const double r = values[j] - fit.value;
        rss += r * r;
        scale = std::max(scale, std::fabs(values[j]));
    }
    // an RSS at round-off scale is an exact fit; collapsing it to zero keeps
    // the smallest-bandwidth tie-break deterministic
    if (rss <= static_cast<double>(n) * (1e-10 * scale) * (1e-10 * scale)) rss = 0.0;

    const double dn = static_cast<double>(n);
    if (trace >= dn) return std::numeric_limits<double>::infinity();
    const double denom = dn - trace;
    return dn * rss / (denom * denom);
}

ConsolidatedSeries GeneFit::as_series() const {
    ConsolidatedSeries s;
    s.probe_id = probe_id;
    s.points.reserve(obs_times.size());
    for (std::size_t i = 0; i < obs_times.size(); ++i) {
        s.points.push_back({obs_times[i], obs_values[i], i < obs_bio.size() ? obs_bio[i] : ""});
    }
    return s;
}

namespace {

// A fraction is usable only if every evaluation point keeps at least two
// distinct times inside its window (so at worst the local line applies).
bool fraction_feasible(const std::vector<double>& times, double fraction,
                       const std::vector<double>& check_points) {
    for (double t0 : check_points) {
        const double h = nn_bandwidth(times, t0, fraction);
        if (!(h > 0.0)) return false;
        double first_time = 0.0;
        bool any = false, two = false;
        for (double t : times) {
            if (std::fabs(t - t0) < h) {
                if (!any) {
                    any = true;
                    first_time = t;
                } else if (t != first_time) {
                    two = true;
                    break;
                }
            }
        }
        if (!two) return false;
    }
    return true;
}

}  // namespace

double GeneFit::fitted_at(double t) const {
    return local_fit_at(as_series(), t, bandwidth).value;
}

double GeneFit::l_norm_at(double t) const {
    return local_fit_at(as_series(), t, bandwidth).hat_norm();
}

std::vector<double> GeneFit::hat_at(double t) const {
    return local_fit_at(as_series(), t, bandwidth).hat;
}

std::vector<double> GeneFit::distinct_obs_times() const {
    std::vector<double> out = obs_times;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

GeneFit select_bandwidth(const ConsolidatedSeries& series, const LocalFitConfig& cfg) {
    cfg.validate();
    const std::size_t n = series.size();
    if (n < 3) fail(ErrorCategory::validation, "series " + series.probe_id + " has fewer than 3 points");

    const auto times_sorted = series.distinct_times();
    const double t_min = times_sorted.front();
    const double t_max = times_sorted.back();
    const auto eval_points = cfg.resolved_eval_grid(t_min, t_max);

    // feasibility is checked everywhere a fit will be requested: the
    // observed times, the evaluation grid, and the fine band grid
    const std::vector<double> obs_times = series.times();
    std::vector<double> check_points = obs_times;
    check_points.insert(check_points.end(), eval_points.begin(), eval_points.end());
    if (cfg.tube_check_points >= 2) {
        const auto fine = equispaced_grid(t_min, t_max, cfg.tube_check_points);
        check_points.insert(check_points.end(), fine.begin(), fine.end());
    }

    double best_fraction = 0.0;
    double best_gcv = std::numeric_limits<double>::infinity();
    bool any_finite = false;
    for (double fraction : cfg.bandwidth_grid) {
        if (!fraction_feasible(obs_times, fraction, check_points)) continue;
        double score;
        try {
            score = gcv_score(series, fraction);
        } catch (const Error&) {
            continue;  // degenerate at this fraction, excluded from selection
        }
        if (!std::isfinite(score)) continue;
        if (score < best_gcv) {  // ties keep the earlier (smaller) fraction
            best_gcv = score;
            best_fraction = fraction;
            any_finite = true;
        }
    }
    if (!any_finite) {
        std::ostringstream msg;
        msg << "no usable bandwidth for " << series.probe_id << "; grid {";
        for (std::size_t i = 0; i < cfg.bandwidth_grid.size(); ++i) {
            if (i) msg << ", ";
            msg << format_value(cfg.bandwidth_grid[i]);
        }
        msg << "} is degenerate";
        fail(ErrorCategory::numeric, msg.str());
    }

    GeneFit fit;
    fit.probe_id = series.probe_id;
    fit.bandwidth = best_fraction;
    fit.gcv = best_gcv;
    fit.obs_times = series.times();
    fit.obs_values = series.values();
    for (const auto& p : series.points) fit.obs_bio.push_back(p.biological_replicate);

    const auto times = fit.obs_times;
    for (std::size_t j = 0; j < n; ++j) {
        LocalFitPoint lf = local_fit_at(series, times[j], best_fraction);
        fit.fitted_obs.push_back({times[j], lf.value});
        fit.l_norm_obs.push_back({times[j], lf.hat_norm()});
        fit.residuals.push_back({times[j], fit.obs_values[j] - lf.value});
        fit.hat_trace += lf.hat[j];
        fit.hat_trace2 += lf.hat_norm() * lf.hat_norm();
        fit.used_degree_fallback = fit.used_degree_fallback || lf.degree_used < cfg.degree;
    }

    const auto grid = cfg.resolved_eval_grid(*std::min_element(times.begin(), times.end()),
                                             *std::max_element(times.begin(), times.end()));
    for (double t : grid) {
        LocalFitPoint lf = local_fit_at(series, t, best_fraction);
        fit.fitted.push_back({t, lf.value});
        fit.l_norm.push_back({t, lf.hat_norm()});
        fit.used_degree_fallback = fit.used_degree_fallback || lf.degree_used < cfg.degree;
    }
    return fit;
}

}
