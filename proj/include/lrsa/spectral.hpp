#pragma once

// Clustering of fitted temporal profiles: per-gene standardization on a
// dense grid, a correlation affinity, eigenvector clustering on the
// symmetrically normalized affinity, seeded deterministic k-means, and
// per-cluster median patterns.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lrsa/smoother.hpp"

namespace lrsa {

struct ProfileMatrix {
    std::vector<std::string> rows;  // gene ids
    std::vector<double> grid;
    std::vector<double> values;     // row-major, standardized to mean 0 / sd 1
    std::vector<std::string> excluded_flat;  // genes dropped for zero variance

    std::size_t n_rows() const { return rows.size(); }
    std::size_t n_cols() const { return grid.size(); }
    double at(std::size_t r, std::size_t c) const { return values[r * n_cols() + c]; }
};

// Restricts fits to de_ids, evaluates them on the grid, and standardizes
// each row. Flat fits are excluded and listed in excluded_flat.
ProfileMatrix build_profiles(const std::vector<GeneFit>& fits, const std::set<std::string>& de_ids,
                             const std::vector<double>& grid);

struct AffinityMatrix {
    std::vector<std::string> ids;
    std::vector<double> values;  // symmetric, zero diagonal

    std::size_t size() const { return ids.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * size() + j]; }
};

// a_ij = (1 + pearson(row_i, row_j)) / 2 off-diagonal, a_ii = 0.
AffinityMatrix affinity(const ProfileMatrix& p);

struct ClusterResult {
    std::map<std::string, int> labels;  // gene id -> cluster in [1..k]
    int k = 0;
    std::vector<double> eigenvalues;    // top-k of the normalized affinity
    std::map<int, std::vector<FitSample>> medians;  // per-cluster median pattern
    double kmeans_inertia = 0.0;
};

// Eigenvector clustering: rows of the top-k eigenvector matrix of
// D^{-1/2} A D^{-1/2}, normalized to unit length, grouped by seeded k-means
// (farthest-point init, best inertia over restarts).
ClusterResult spectral_cluster(const AffinityMatrix& a, int k, std::uint64_t seed, int restarts = 20);

// Per-cluster, per-time median of member profiles.
std::map<int, std::vector<FitSample>> cluster_medians(const ProfileMatrix& p,
                                                      const std::map<std::string, int>& labels);

// Pearson correlation between 2^(f(t)-f(0)) and the reference's relative
// expression values at the reference times.
double validate_against_reference(const GeneFit& fit, const std::vector<FitSample>& reference);

// Seeded k-means used by the spectral step; exposed for tests.
struct KMeansResult {
    std::vector<int> labels;  // 0-based
    double inertia = 0.0;
};
KMeansResult kmeans(const std::vector<double>& points, std::size_t n, std::size_t dim, int k,
                    std::uint64_t seed, int restarts, int max_iter = 300, double tol = 1e-8);

}
