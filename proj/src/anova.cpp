#include "lrsa/anova.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "lrsa/mathx.hpp"

namespace lrsa {

AnovaResult anova_fit(const ConsolidatedSeries& series) {
    const std::size_t n = series.size();
    const auto distinct = series.distinct_times();
    if (n < 4 || distinct.size() < 3) {
        fail(ErrorCategory::validation, "anova needs >= 4 observations over >= 3 distinct times (" +
             series.probe_id + ")");
    }

    const auto t = series.times();
    const auto y = series.values();

    // quadratic OLS via 3x3 normal equations
    std::vector<double> m(9, 0.0), rhs(3, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double x[3] = {1.0, t[j], t[j] * t[j]};
        for (std::size_t r = 0; r < 3; ++r) {
            rhs[r] += x[r] * y[j];
            for (std::size_t c = 0; c < 3; ++c) m[r * 3 + c] += x[r] * x[c];
        }
    }
    if (!solve_dense(m, rhs, 3)) {
        fail(ErrorCategory::numeric, "degenerate quadratic design for " + series.probe_id);
    }

    const double ybar = mean_of(y);
    double rss1 = 0.0, rss0 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double fit = rhs[0] + rhs[1] * t[j] + rhs[2] * t[j] * t[j];
        rss1 += (y[j] - fit) * (y[j] - fit);
        rss0 += (y[j] - ybar) * (y[j] - ybar);
    }

    AnovaResult out;
    out.probe_id = series.probe_id;
    const double df2 = static_cast<double>(n) - 3.0;
    if (rss0 <= 0.0) {
        // constant data: the null model already fits exactly
        out.f_statistic = 0.0;
        out.p_value = 1.0;
    } else if (rss1 <= rss0 * 1e-14) {
        out.f_statistic = std::numeric_limits<double>::infinity();
        out.p_value = 1e-15;  // reported as < 1e-15
    } else {
        out.f_statistic = ((rss0 - rss1) / 2.0) / (rss1 / df2);
        out.p_value = f_distribution_sf(out.f_statistic, 2.0, df2);
    }
    out.p_adjusted = out.p_value;

    // fold filter on group means at the design times
    std::map<double, std::pair<double, std::size_t>> groups;
    for (std::size_t j = 0; j < n; ++j) {
        auto& g = groups[t[j]];
        g.first += y[j];
        g.second += 1;
    }
    auto it0 = groups.find(0.0);
    if (it0 != groups.end()) {
        const double mean0 = it0->second.first / static_cast<double>(it0->second.second);
        for (const auto& [time, g] : groups) {
            if (!(time > 0.0)) continue;
            const double delta = g.first / static_cast<double>(g.second) - mean0;
            out.max_abs_log2_delta = std::max(out.max_abs_log2_delta, std::fabs(delta));
        }
    }
    return out;
}

std::vector<double> bh_adjust(const std::vector<double>& p_values) {
    const std::size_t m = p_values.size();
    for (double p : p_values) {
        if (!(p >= 0.0) || p > 1.0) fail(ErrorCategory::validation, "p-value outside [0, 1]");
    }
    if (m == 0) return {};

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p_values[a] < p_values[b]; });

    std::vector<double> adjusted(m);
    double running_min = 1.0;
    for (std::size_t i = m; i-- > 0;) {
        const double q = p_values[order[i]] * static_cast<double>(m) / static_cast<double>(i + 1);
        running_min = std::min(running_min, q);
        adjusted[order[i]] = std::min(running_min, 1.0);
    }
    return adjusted;
}

void bh_adjust_in_place(std::vector<AnovaResult>& results) {
    std::vector<double> p;
    p.reserve(results.size());
    for (const auto& r : results) p.push_back(r.p_value);
    const auto adj = bh_adjust(p);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].p_adjusted = adj[i];
}

std::set<std::string> anova_call(const std::vector<AnovaResult>& results, double alpha,
                                 double fold_threshold, bool adjust) {
    const double min_delta = std::log2(fold_threshold);
    std::set<std::string> out;
    for (const auto& r : results) {
        const double p = adjust ? r.p_adjusted : r.p_value;
        if (p <= alpha && r.max_abs_log2_delta >= min_delta) out.insert(r.probe_id);
    }
    return out;
}

}
