#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>

namespace oracles {

namespace {

long double det3(const long double m[9]) {
    return m[0] * (m[4] * m[8] - m[5] * m[7])
         - m[1] * (m[3] * m[8] - m[5] * m[6])
         + m[2] * (m[3] * m[7] - m[4] * m[6]);
}

long double det2(long double a, long double b, long double c, long double d) {
    return a * d - b * c;
}

}  // namespace

WeightedFit cramer_local_fit(const std::vector<double>& times, const std::vector<double>& values,
                             double t0, double fraction) {
    const std::size_t n = times.size();
    std::vector<long double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = std::fabs(times[i] - t0);
    std::vector<long double> ds = d;
    std::size_t k = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    k = std::min(std::max<std::size_t>(k, 1), n);
    std::sort(ds.begin(), ds.end());
    const long double h = ds[k - 1];
    if (!(h > 0.0L)) throw std::runtime_error("oracle: degenerate window");

    std::vector<long double> w(n, 0.0L);
    std::vector<double> window_times;
    for (std::size_t i = 0; i < n; ++i) {
        if (d[i] < h) {
            const long double u = d[i] / h;
            const long double t = 1.0L - u * u * u;
            w[i] = t * t * t;
            window_times.push_back(times[i]);
        }
    }
    std::sort(window_times.begin(), window_times.end());
    window_times.erase(std::unique(window_times.begin(), window_times.end()), window_times.end());

    WeightedFit out;
    out.hat.assign(n, 0.0);

    if (window_times.size() >= 3) {
        long double m[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == 0.0L) continue;
            const long double x1 = times[i] - t0;
            const long double x2 = x1 * x1;
            const long double b[3] = {1.0L, x1, x2};
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) m[r * 3 + c] += w[i] * b[r] * b[c];
        }
        const long double dm = det3(m);
        if (dm != 0.0L) {
            // z = M^{-1} e1 by Cramer: z_r = det(M with column r replaced by e1)/det(M)
            long double z[3];
            for (int r = 0; r < 3; ++r) {
                long double mr[9];
                std::copy(m, m + 9, mr);
                for (int row = 0; row < 3; ++row) mr[row * 3 + r] = row == 0 ? 1.0L : 0.0L;
                z[r] = det3(mr) / dm;
            }
            long double fitted = 0.0L;
            for (std::size_t i = 0; i < n; ++i) {
                if (w[i] == 0.0L) continue;
                const long double x1 = times[i] - t0;
                const long double li = w[i] * (z[0] + z[1] * x1 + z[2] * x1 * x1);
                out.hat[i] = static_cast<double>(li);
                fitted += li * static_cast<long double>(values[i]);
            }
            out.value = static_cast<double>(fitted);
            return out;
        }
    }

    if (window_times.size() >= 2) {  // local line
        long double s0 = 0, s1 = 0, s2 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == 0.0L) continue;
            const long double x1 = times[i] - t0;
            s0 += w[i];
            s1 += w[i] * x1;
            s2 += w[i] * x1 * x1;
        }
        const long double dm = det2(s0, s1, s1, s2);
        if (dm == 0.0L) throw std::runtime_error("oracle: singular local line");
        const long double z0 = det2(1.0L, s1, 0.0L, s2) / dm;
        const long double z1 = det2(s0, 1.0L, s1, 0.0L) / dm;
        long double fitted = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == 0.0L) continue;
            const long double x1 = times[i] - t0;
            const long double li = w[i] * (z0 + z1 * x1);
            out.hat[i] = static_cast<double>(li);
            fitted += li * static_cast<long double>(values[i]);
        }
        out.value = static_cast<double>(fitted);
        return out;
    }
    throw std::runtime_error("oracle: singular local design");
}

double explicit_hat_gcv(const std::vector<double>& times, const std::vector<double>& values,
                        double fraction) {
    const std::size_t n = times.size();
    long double trace = 0.0L;
    long double rss = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
        WeightedFit row = cramer_local_fit(times, values, times[j], fraction);
        trace += row.hat[j];
        const long double r = values[j] - row.value;
        rss += r * r;
    }
    const long double dn = static_cast<long double>(n);
    if (trace >= dn) return std::numeric_limits<double>::infinity();
    return static_cast<double>(dn * rss / ((dn - trace) * (dn - trace)));
}

double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0)) throw std::runtime_error("oracle: quantile outside (0,1)");
    // Acklam 2003 coefficients
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double dd[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((dd[0] * q + dd[1]) * q + dd[2]) * q + dd[3]) * q + 1.0);
    }
    // one Halley polish against the quadrature CDF
    const double e = normal_cdf_quadrature(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x = x - u / (1.0 + 0.5 * x * u);
    return x;
}

namespace {

double simpson(double (*f)(double), double lo, double hi, int depth, double f_lo, double f_hi,
               double f_mid, double eps) {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
    const double f_lm = f(lm), f_rm = f(rm);
    const double whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
    const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
    const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi);
    if (depth <= 0 || std::fabs(left + right - whole) < 15.0 * eps) {
        return left + right + (left + right - whole) / 15.0;
    }
    return simpson(f, lo, mid, depth - 1, f_lo, f_mid, f_lm, eps / 2.0) +
           simpson(f, mid, hi, depth - 1, f_mid, f_hi, f_rm, eps / 2.0);
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI); }

}  // namespace

double normal_cdf_quadrature(double z) {
    if (z < -12.0) return 0.0;
    if (z > 12.0) return 1.0;
    const double lo = -12.0;
    return simpson(normal_pdf, lo, z, 40, normal_pdf(lo), normal_pdf(z),
                   normal_pdf(0.5 * (lo + z)), 1e-13);
}

double tube_critical_value(double kappa0, double alpha) {
    auto lhs = [kappa0](double c) {
        return kappa0 / M_PI * std::exp(-0.5 * c * c) + 2.0 * (1.0 - normal_cdf_quadrature(c));
    };
    // coarse scan for a bracket, then secant
    double lo = 0.0, hi = 0.0;
    for (double c = 0.0; c <= 10.0; c += 0.25) {
        if (lhs(c) <= alpha) {
            hi = c;
            lo = c - 0.25;
            break;
        }
    }
    if (hi == 0.0) throw std::runtime_error("oracle: no bracket for the critical value");
    double x0 = lo, x1 = hi;
    double f0 = lhs(x0) - alpha, f1 = lhs(x1) - alpha;
    for (int i = 0; i < 100; ++i) {
        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        const double f2 = lhs(x2) - alpha;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        if (std::fabs(f1) < 1e-15 || std::fabs(x1 - x0) < 1e-12) break;
    }
    return x1;
}

long double pascal_choose(unsigned n, unsigned k) {
    if (k > n) return 0.0L;
    static std::vector<std::vector<long double>> triangle{{1.0L}};
    while (triangle.size() <= n) {
        const auto& prev = triangle.back();
        std::vector<long double> row(prev.size() + 1, 1.0L);
        for (std::size_t i = 1; i < prev.size(); ++i) row[i] = prev[i - 1] + prev[i];
        triangle.push_back(std::move(row));
    }
    return triangle[n][k];
}

double fisher_two_sided_enumeration(unsigned a, unsigned b, unsigned c, unsigned d) {
    const unsigned r1 = a + b, r2 = c + d, n1 = a + c, total = a + b + c + d;
    const long double denom = pascal_choose(total, n1);
    const unsigned klo = n1 > r2 ? n1 - r2 : 0;
    const unsigned khi = std::min(r1, n1);
    const long double p_obs = pascal_choose(r1, a) * pascal_choose(r2, n1 - a) / denom;
    const long double cutoff = p_obs * (1.0L + 1e-7L);
    long double sum = 0.0L;
    for (unsigned k = klo; k <= khi; ++k) {
        const long double p = pascal_choose(r1, k) * pascal_choose(r2, n1 - k) / denom;
        if (p <= cutoff) sum += p;
    }
    return static_cast<double>(std::min(sum, 1.0L));
}

namespace {

double f_d1 = 2.0, f_d2 = 3.0;

double f_pdf(double x) {
    if (x <= 0.0) return 0.0;
    const double d1 = f_d1, d2 = f_d2;
    const double log_beta = std::lgamma(d1 / 2.0) + std::lgamma(d2 / 2.0) - std::lgamma((d1 + d2) / 2.0);
    const double log_pdf = 0.5 * d1 * std::log(d1 / d2) + (0.5 * d1 - 1.0) * std::log(x) -
                           0.5 * (d1 + d2) * std::log1p(d1 * x / d2) - log_beta;
    return std::exp(log_pdf);
}

}  // namespace

double f_sf_quadrature(double f, double d1, double d2) {
    if (!(f > 0.0)) return 1.0;
    f_d1 = d1;
    f_d2 = d2;
    // integrate the density over (0, f); the tail is 1 minus that
    const double lo = 1e-12;
    const double cdf = simpson(f_pdf, lo, f, 48, f_pdf(lo), f_pdf(f), f_pdf(0.5 * (lo + f)), 1e-13);
    return std::max(0.0, 1.0 - cdf);
}

namespace {

double t_df_global = 1.0;

double t_pdf(double x) {
    const double v = t_df_global;
    const double log_norm = std::lgamma((v + 1.0) / 2.0) - std::lgamma(v / 2.0) -
                            0.5 * std::log(v * M_PI);
    return std::exp(log_norm - 0.5 * (v + 1.0) * std::log1p(x * x / v));
}

}  // namespace

double t_sf_quadrature(double c, double df) {
    if (c <= 0.0) return 0.5;
    t_df_global = df;
    const double cdf_piece = simpson(t_pdf, 0.0, c, 48, t_pdf(0.0), t_pdf(c), t_pdf(0.5 * c), 1e-13);
    return std::max(0.0, 0.5 - cdf_piece);
}

std::vector<double> bh_direct(const std::vector<double>& p) {
    const std::size_t m = p.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return p[x] < p[y]; });
    std::vector<double> adjusted(m);
    for (std::size_t i = 0; i < m; ++i) {
        double q = 2.0;
        for (std::size_t j = i; j < m; ++j) {
            q = std::min(q, p[order[j]] * static_cast<double>(m) / static_cast<double>(j + 1));
        }
        adjusted[order[i]] = std::min(q, 1.0);
    }
    return adjusted;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty()) throw std::runtime_error("oracle: ARI size mismatch");
    std::map<std::pair<int, int>, long long> joint;
    std::map<int, long long> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++joint[{a[i], b[i]}];
        ++ra[a[i]];
        ++rb[b[i]];
    }
    auto choose2 = [](long long x) { return 0.5 * static_cast<double>(x) * static_cast<double>(x - 1); };
    double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
    for (const auto& [key, cnt] : joint) sum_joint += choose2(cnt);
    for (const auto& [key, cnt] : ra) sum_a += choose2(cnt);
    for (const auto& [key, cnt] : rb) sum_b += choose2(cnt);
    const double total = choose2(static_cast<long long>(a.size()));
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    if (max_index == expected) return 1.0;
    return (sum_joint - expected) / (max_index - expected);
}

}
