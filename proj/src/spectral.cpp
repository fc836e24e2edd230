#include "lrsa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "lrsa/mathx.hpp"
#include "lrsa/tsv.hpp"

namespace lrsa {

ProfileMatrix build_profiles(const std::vector<GeneFit>& fits, const std::set<std::string>& de_ids,
                             const std::vector<double>& grid) {
    if (grid.size() < 2) fail(ErrorCategory::validation, "profile grid needs >= 2 points");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) fail(ErrorCategory::validation, "profile grid must be strictly increasing");
    }

    ProfileMatrix out;
    out.grid = grid;
    const std::size_t T = grid.size();
    std::vector<double> row(T);
    for (const auto& fit : fits) {
        if (!de_ids.count(fit.probe_id)) continue;

        // reuse stored grid fits when the grids match, refit otherwise
        bool grids_match = fit.fitted.size() == T;
        if (grids_match) {
            for (std::size_t c = 0; c < T; ++c) {
                if (std::fabs(fit.fitted[c].t - grid[c]) > 1e-9) {
                    grids_match = false;
                    break;
                }
            }
        }
        const ConsolidatedSeries series = grids_match ? ConsolidatedSeries{} : fit.as_series();
        for (std::size_t c = 0; c < T; ++c) {
            row[c] = grids_match ? fit.fitted[c].value : local_fit_at(series, grid[c], fit.bandwidth).value;
        }

        double mean = 0.0;
        for (double v : row) mean += v;
        mean /= static_cast<double>(T);
        double var = 0.0;
        for (double v : row) var += (v - mean) * (v - mean);
        var /= static_cast<double>(T);
        if (!(var > 1e-24)) {
            out.excluded_flat.push_back(fit.probe_id);
            continue;
        }
        const double sd = std::sqrt(var);
        out.rows.push_back(fit.probe_id);
        for (double v : row) out.values.push_back((v - mean) / sd);
    }
    return out;
}

AffinityMatrix affinity(const ProfileMatrix& p) {
    const std::size_t n = p.n_rows();
    if (n < 2) fail(ErrorCategory::validation, "affinity needs >= 2 profiles");
    const std::size_t T = p.n_cols();

    AffinityMatrix a;
    a.ids = p.rows;
    a.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            std::vector<double> x(T), y(T);
            for (std::size_t c = 0; c < T; ++c) {
                x[c] = p.at(i, c);
                y[c] = p.at(j, c);
            }
            double r = pearson_correlation(x, y);
            r = std::clamp(r, -1.0, 1.0);
            const double val = 0.5 * (1.0 + r);
            a.values[i * n + j] = val;
            a.values[j * n + i] = val;
        }
    }
    return a;
}

KMeansResult kmeans(const std::vector<double>& points, std::size_t n, std::size_t dim, int k,
                    std::uint64_t seed, int restarts, int max_iter, double tol) {
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        fail(ErrorCategory::validation, "k-means needs 1 <= k <= n");
    }
    std::mt19937_64 rng(seed);

    auto dist2 = [&](std::size_t point, const std::vector<double>& centers, int center) {
        double s = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = points[point * dim + d] - centers[center * dim + d];
            s += diff * diff;
        }
        return s;
    };

    KMeansResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < std::max(restarts, 1); ++restart) {
        // farthest-point init from a random start; ties go to the lowest index
        std::vector<double> centers(static_cast<std::size_t>(k) * dim);
        std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
        for (std::size_t d = 0; d < dim; ++d) centers[d] = points[first * dim + d];
        std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
        for (int c = 1; c < k; ++c) {
            for (std::size_t i = 0; i < n; ++i) {
                nearest[i] = std::min(nearest[i], dist2(i, centers, c - 1));
            }
            std::size_t far = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (nearest[i] > nearest[far]) far = i;
            }
            for (std::size_t d = 0; d < dim; ++d) centers[c * dim + d] = points[far * dim + d];
        }

        std::vector<int> labels(n, 0);
        std::vector<double> new_centers(static_cast<std::size_t>(k) * dim);
        std::vector<std::size_t> counts(k);
        for (int iter = 0; iter < max_iter; ++iter) {
            for (std::size_t i = 0; i < n; ++i) {
                int arg = 0;
                double dmin = dist2(i, centers, 0);
                for (int c = 1; c < k; ++c) {
                    const double d = dist2(i, centers, c);
                    if (d < dmin) {
                        dmin = d;
                        arg = c;
                    }
                }
                labels[i] = arg;
            }

            std::fill(new_centers.begin(), new_centers.end(), 0.0);
            std::fill(counts.begin(), counts.end(), 0u);
            for (std::size_t i = 0; i < n; ++i) {
                ++counts[labels[i]];
                for (std::size_t d = 0; d < dim; ++d) {
                    new_centers[labels[i] * dim + d] += points[i * dim + d];
                }
            }
            for (int c = 0; c < k; ++c) {
                if (counts[c] == 0) {
                    // revive an empty cluster with the point farthest from its center
                    std::size_t far = 0;
                    double dmax = -1.0;
                    for (std::size_t i = 0; i < n; ++i) {
                        const double d = dist2(i, centers, labels[i]);
                        if (d > dmax) {
                            dmax = d;
                            far = i;
                        }
                    }
                    for (std::size_t d = 0; d < dim; ++d) new_centers[c * dim + d] = points[far * dim + d];
                    counts[c] = 1;
                    labels[far] = c;
                } else {
                    for (std::size_t d = 0; d < dim; ++d) {
                        new_centers[c * dim + d] /= static_cast<double>(counts[c]);
                    }
                }
            }

            double movement = 0.0;
            for (std::size_t i = 0; i < centers.size(); ++i) {
                movement = std::max(movement, std::fabs(new_centers[i] - centers[i]));
            }
            centers.swap(new_centers);
            if (movement < tol) break;
        }

        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) inertia += dist2(i, centers, labels[i]);
        if (inertia < best.inertia) {
            best.inertia = inertia;
            best.labels = labels;
        }
    }
    return best;
}

ClusterResult spectral_cluster(const AffinityMatrix& a, int k, std::uint64_t seed, int restarts) {
    const std::size_t n = a.size();
    if (k < 2) fail(ErrorCategory::validation, "spectral clustering needs k >= 2");
    if (static_cast<std::size_t>(k) > n) {
        fail(ErrorCategory::validation, "k=" + std::to_string(k) + " exceeds the " +
             std::to_string(n) + " available genes");
    }

    std::vector<double> dinv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) row_sum += a.at(i, j);
        if (!(row_sum > 0.0)) {
            fail(ErrorCategory::numeric, "isolated gene \"" + a.ids[i] + "\": zero affinity row sum");
        }
        dinv_sqrt[i] = 1.0 / std::sqrt(row_sum);
    }

    std::vector<double> lap(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            lap[i * n + j] = dinv_sqrt[i] * a.at(i, j) * dinv_sqrt[j];
        }
    }

    const EigenDecomposition eig = jacobi_eigen(std::move(lap), n);

    // rows of the top-k eigenvector matrix, renormalized to the unit sphere
    std::vector<double> embed(n * static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < n; ++i) {
        double norm2 = 0.0;
        for (int c = 0; c < k; ++c) {
            const double v = eig.vectors[i * n + static_cast<std::size_t>(c)];
            embed[i * k + c] = v;
            norm2 += v * v;
        }
        if (norm2 > 0.0) {
            const double inv = 1.0 / std::sqrt(norm2);
            for (int c = 0; c < k; ++c) embed[i * k + c] *= inv;
        }
    }

    const KMeansResult km = kmeans(embed, n, static_cast<std::size_t>(k), k, seed, restarts);

    ClusterResult out;
    out.k = k;
    out.kmeans_inertia = km.inertia;
    out.eigenvalues.assign(eig.values.begin(), eig.values.begin() + k);
    for (std::size_t i = 0; i < n; ++i) out.labels[a.ids[i]] = km.labels[i] + 1;
    return out;
}

std::map<int, std::vector<FitSample>> cluster_medians(const ProfileMatrix& p,
                                                      const std::map<std::string, int>& labels) {
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < p.n_rows(); ++i) {
        auto it = labels.find(p.rows[i]);
        if (it == labels.end()) {
            fail(ErrorCategory::validation, "gene \"" + p.rows[i] + "\" has no cluster label");
        }
        members[it->second].push_back(i);
    }
    for (const auto& [cluster, rows] : members) {
        if (rows.empty()) fail(ErrorCategory::validation, "cluster " + std::to_string(cluster) + " is empty");
    }

    std::map<int, std::vector<FitSample>> out;
    std::vector<double> column;
    for (const auto& [cluster, rows] : members) {
        std::vector<FitSample> pattern;
        pattern.reserve(p.n_cols());
        for (std::size_t c = 0; c < p.n_cols(); ++c) {
            column.clear();
            for (std::size_t r : rows) column.push_back(p.at(r, c));
            pattern.push_back({p.grid[c], median_of(column)});
        }
        out.emplace(cluster, std::move(pattern));
    }
    return out;
}

double validate_against_reference(const GeneFit& fit, const std::vector<FitSample>& reference) {
    if (reference.size() < 3) {
        fail(ErrorCategory::validation, "reference validation needs >= 3 common time points");
    }
    const double f0 = fit.fitted_at(0.0);
    std::vector<double> relative, observed;
    for (const auto& ref : reference) {
        relative.push_back(std::exp2(fit.fitted_at(ref.t) - f0));
        observed.push_back(ref.value);
    }
    return pearson_correlation(relative, observed);
}

}
