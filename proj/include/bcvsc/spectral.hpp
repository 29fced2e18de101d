#pragma once

#include "bcvsc/dataset.hpp"
#include "bcvsc/graph.hpp"

#include <cstdint>
#include <vector>

namespace bcvsc {

struct SpectralEmbedding {
  Matrix vectors;      // n x k, D-orthonormal columns
  Vector eigenvalues;  // ascending
};

// k smallest solutions of L_n v = lambda D v. Each column is scaled to
// v^T D v = 1 and its first nonzero entry is made positive.
SpectralEmbedding spectral_embedding(const AffinityGraph& graph, const NormalizedLaplacian& laplacian, int k);

struct KMeansOptions {
  int restarts = 10;
  int max_iterations = 300;
  double tolerance = 1e-6;      // max centroid shift that counts as converged
  bool check_monotone = false;  // throw if an iteration increases inertia
};

struct ClusteringResult {
  std::vector<int> labels;
  int k = 0;
  double gamma = 0.0;  // 0 when the points did not come from a kernel
  double inertia = 0.0;
  std::uint64_t seed = 0;
  bool degenerate = false;  // all points identical with k > 1; labels are a fixed split
};

// Lloyd iterations from k-means++ seeds; restart r draws from derive_seed(seed, {r}).
// The lowest-inertia restart wins, earliest on ties.
ClusteringResult kmeans_assign(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options = {});

// rbf_weight_matrix -> normalized_laplacian -> spectral_embedding -> kmeans_assign.
ClusteringResult spectral_cluster(const Dataset& data, int k, double gamma, std::uint64_t seed);

inline constexpr double kDefaultDensityGamma = 1e-2;

// Appends a "degree" column, entry i = sum_j exp(-gamma_density |x_i - x_j|^2).
Dataset degree_feature_column(const Dataset& data, double gamma_density = kDefaultDensityGamma);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace bcvsc
