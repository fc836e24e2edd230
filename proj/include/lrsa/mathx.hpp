#pragma once

// Numerical building blocks shared across the library: special functions,
// a small dense linear solver, a cyclic Jacobi eigensolver, and descriptive
// statistics. Everything here is deterministic and allocation-light.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "lrsa/error.hpp"

namespace lrsa {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

// Log-gamma via Lanczos (g=7, n=9). Self-contained so results do not depend
// on the platform libm and stay identical across threads.
inline double log_gamma(double x) {
    static constexpr double kCoeff[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    if (x < 0.5) {
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = kCoeff[0];
    for (int i = 1; i < 9; ++i) a += kCoeff[i] / (x + i);
    double t = x + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (x + 0.5) * std::log(t) - t + std::log(a);
}

inline double log_choose(double n, double k) {
    return log_gamma(n + 1.0) - log_gamma(k + 1.0) - log_gamma(n - k + 1.0);
}

// Standard normal CDF.
inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

// Regularized incomplete beta I_x(a,b) by Lentz's continued fraction.
// Drives the F-distribution tail used by the ANOVA baseline.
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;

    bool flip = x > (a + 1.0) / (a + b + 2.0);
    if (flip) {
        std::swap(a, b);
        x = 1.0 - x;
    }

    const double log_front = a * std::log(x) + b * std::log(1.0 - x)
        - (log_gamma(a) + log_gamma(b) - log_gamma(a + b));

    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    double c = 1.0;
    double d = 1.0 - (a + b) * x / (a + 1.0);
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double f = d;

    for (int m = 1; m <= 400; ++m) {
        double dm = static_cast<double>(m);
        // even step
        double num = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
        d = 1.0 + num * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        f *= c * d;
        // odd step
        num = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
        d = 1.0 + num * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + num / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }

    double result = std::exp(log_front) * f / a;
    result = flip ? 1.0 - result : result;
    if (result < 0.0) result = 0.0;
    if (result > 1.0) result = 1.0;
    return result;
}

// P(F(d1, d2) > f), the upper tail of the F distribution.
inline double f_distribution_sf(double f, double d1, double d2) {
    if (!(f > 0.0)) return 1.0;
    return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

// ---------------------------------------------------------------------------
// Dense linear algebra (tiny systems only)
// ---------------------------------------------------------------------------

// Solves A x = b in place with partial pivoting; A is row-major p x p.
// Returns false if a pivot falls below the relative tolerance.
inline bool solve_dense(std::vector<double>& a, std::vector<double>& b, std::size_t p) {
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::fabs(v));
    const double tol = std::max(scale, 1.0) * 1e-13;

    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r) {
            if (std::fabs(a[r * p + col]) > std::fabs(a[pivot * p + col])) pivot = r;
        }
        if (std::fabs(a[pivot * p + col]) < tol) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < p; ++c) std::swap(a[col * p + c], a[pivot * p + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * p + col];
        for (std::size_t r = col + 1; r < p; ++r) {
            const double factor = a[r * p + col] * inv;
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < p; ++c) a[r * p + c] -= factor * a[col * p + c];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t i = p; i-- > 0;) {
        double sum = b[i];
        for (std::size_t c = i + 1; c < p; ++c) sum -= a[i * p + c] * b[c];
        b[i] = sum / a[i * p + i];
    }
    return true;
}

// Symmetric eigendecomposition by cyclic Jacobi sweeps. Eigenpairs are
// returned sorted by descending eigenvalue; deterministic for a given input.
struct EigenDecomposition {
    std::vector<double> values;   // size n, descending
    std::vector<double> vectors;  // n x n row-major; column j pairs with values[j]
};

inline EigenDecomposition jacobi_eigen(std::vector<double> a, std::size_t n) {
    EigenDecomposition out;
    out.values.assign(n, 0.0);
    out.vectors.assign(n * n, 0.0);
    std::vector<double>& v = out.vectors;
    for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;
    if (n == 0) return out;

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a[i * n + j] * a[i * n + j];
        if (off < 1e-26 * std::max<std::size_t>(n, 1)) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::fabs(apq) < 1e-300) continue;
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0)
                    / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i * n + p];
                    const double aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double api = a[p * n + i];
                    const double aqi = a[q * n + i];
                    a[p * n + i] = c * api - s * aqi;
                    a[q * n + i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v[i * n + p];
                    const double viq = v[i * n + q];
                    v[i * n + p] = c * vip - s * viq;
                    v[i * n + q] = s * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best = i;
        for (std::size_t j = i + 1; j < n; ++j)
            if (a[order[j] * n + order[j]] > a[order[best] * n + order[best]]) best = j;
        std::swap(order[i], order[best]);
    }

    std::vector<double> sorted_vec(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a[src * n + src];
        // fix the sign so the largest-magnitude component is positive
        double extreme = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::fabs(v[i * n + src]) > std::fabs(extreme)) extreme = v[i * n + src];
        const double sign = extreme < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) sorted_vec[i * n + j] = sign * v[i * n + src];
    }
    out.vectors = std::move(sorted_vec);
    return out;
}

// ---------------------------------------------------------------------------
// Descriptive statistics
// ---------------------------------------------------------------------------

inline double mean_of(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v;
    return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

inline double pearson_correlation(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) {
        fail(ErrorCategory::validation, "pearson correlation needs two equal-length vectors of size >= 2");
    }
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        fail(ErrorCategory::numeric, "pearson correlation undefined for a constant vector");
    }
    return sxy / std::sqrt(sxx * syy);
}

// Median with the even-count mean-of-middle-two convention.
inline double median_of(std::vector<double> x) {
    if (x.empty()) fail(ErrorCategory::validation, "median of empty set");
    std::size_t n = x.size();
    std::sort(x.begin(), x.end());
    if (n % 2 == 1) return x[n / 2];
    return 0.5 * (x[n / 2 - 1] + x[n / 2]);
}

}
