#include "bcvsc/spectral.hpp"

#include "bcvsc/error.hpp"
#include "bcvsc/seeding.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <utility>

namespace bcvsc {

SpectralEmbedding spectral_embedding(const AffinityGraph& graph, const NormalizedLaplacian& laplacian, int k) {
  const Eigen::Index n = laplacian.matrix.rows();
  if (k < 1 || k > n) throw Error(ErrorCode::RankOutOfRange, "embedding dimension must be in [1, n]");
  if (graph.degrees.size() != n) throw Error(ErrorCode::InvalidArgument, "graph and Laplacian sizes differ");

  const Matrix d = graph.degrees.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(laplacian.matrix, d);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::EigensolverFailure, "generalized eigensolver did not converge");
  }

  SpectralEmbedding out;
  out.eigenvalues = solver.eigenvalues().head(k);
  out.vectors = solver.eigenvectors().leftCols(k);
  for (Eigen::Index c = 0; c < k; ++c) {
    auto v = out.vectors.col(c);
    v /= std::sqrt(v.dot(graph.degrees.cwiseProduct(v)));
    const double scale = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-12 * scale) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
    const Vector dv = graph.degrees.cwiseProduct(v);
    const double residual = (laplacian.matrix * v - out.eigenvalues(c) * dv).norm();
    if (!std::isfinite(residual) || residual > 1e-6 * dv.norm()) {
      std::ostringstream msg;
      msg << "eigenpair " << c << " residual " << residual << " exceeds tolerance";
      throw Error(ErrorCode::EigensolverFailure, msg.str());
    }
  }
  return out;
}

namespace {

Matrix kmeanspp_centers(const Matrix& points, int k, Rng& rng) {
  const Eigen::Index n = points.rows();
  Matrix centers(k, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  Eigen::Index pick = first(rng);
  centers.row(0) = points.row(pick);
  chosen[static_cast<std::size_t>(pick)] = true;

  Vector dist2 = (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    if (total > 0.0) {
      std::uniform_real_distribution<double> unif(0.0, total);
      const double target = unif(rng);
      double acc = 0.0;
      pick = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += dist2(i);
        if (dist2(i) > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // rounding at the top of the cumulative sum
        for (Eigen::Index i = n - 1; i >= 0; --i) {
          if (dist2(i) > 0.0) {
            pick = i;
            break;
          }
        }
      }
    } else {
      // Every remaining point coincides with a center.
      pick = 0;
      while (chosen[static_cast<std::size_t>(pick)]) ++pick;
    }
    centers.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
    dist2 = dist2.cwiseMin((points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

struct LloydRun {
  std::vector<int> labels;
  double inertia = 0.0;
};

double assign(const Matrix& points, const Matrix& centers, std::vector<int>& labels, Vector& dist2) {
  double inertia = 0.0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Eigen::Index c = 0; c < centers.rows(); ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    dist2(i) = best_d;
    inertia += best_d;
  }
  return inertia;
}

LloydRun lloyd(const Matrix& points, Matrix centers, const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  const int k = static_cast<int>(centers.rows());
  LloydRun run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  Vector dist2(n);
  run.inertia = assign(points, centers, run.labels, dist2);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    Matrix next = Matrix::Zero(k, points.cols());
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const int l = run.labels[static_cast<std::size_t>(i)];
      next.row(l) += points.row(i);
      ++counts[static_cast<std::size_t>(l)];
    }
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        next.row(c) /= counts[static_cast<std::size_t>(c)];
        continue;
      }
      // Empty cluster: move it onto the worst-fit point not already used.
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!taken[static_cast<std::size_t>(i)] && (far < 0 || dist2(i) > dist2(far))) far = i;
      }
      taken[static_cast<std::size_t>(far)] = true;
      next.row(c) = points.row(far);
    }
    const double shift = (next - centers).rowwise().norm().maxCoeff();
    centers = std::move(next);
    const double previous = run.inertia;
    run.inertia = assign(points, centers, run.labels, dist2);
    if (options.check_monotone && run.inertia > previous * (1.0 + 1e-12) + 1e-300) {
      throw Error(ErrorCode::InvalidArgument, "k-means inertia increased between iterations");
    }
    if (shift <= options.tolerance) break;
  }
  return run;
}

}  // namespace

ClusteringResult kmeans_assign(const Matrix& points, int k, std::uint64_t seed, const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "k-means needs at least one point");
  if (k < 1 || k > n) throw Error(ErrorCode::RankOutOfRange, "k must be in [1, n]");
  if (!points.allFinite()) throw Error(ErrorCode::NonFiniteInput, "k-means input contains NaN or Inf");

  ClusteringResult out;
  out.k = k;
  out.seed = seed;
  const bool identical = ((points.rowwise() - points.row(0)).rowwise().squaredNorm().maxCoeff() == 0.0);
  if (identical && k > 1) {
    // Contiguous blocks keep every cluster index in use.
    out.degenerate = true;
    out.labels.resize(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out.labels[static_cast<std::size_t>(i)] = static_cast<int>(i * k / n);
    return out;
  }

  bool have = false;
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
    LloydRun run = lloyd(points, kmeanspp_centers(points, k, rng), options);
    if (!have || run.inertia < out.inertia) {
      out.labels = std::move(run.labels);
      out.inertia = run.inertia;
      have = true;
    }
  }
  return out;
}

ClusteringResult spectral_cluster(const Dataset& data, int k, double gamma, std::uint64_t seed) {
  data.validate();
  if (k < 1 || k > data.rows()) throw Error(ErrorCode::RankOutOfRange, "k must be in [1, n]");
  const AffinityGraph graph = rbf_weight_matrix(data, gamma);
  const NormalizedLaplacian lap = normalized_laplacian(graph);
  const SpectralEmbedding emb = spectral_embedding(graph, lap, k);
  ClusteringResult out = kmeans_assign(emb.vectors, k, seed);
  out.gamma = gamma;
  return out;
}

Dataset degree_feature_column(const Dataset& data, double gamma_density) {
  if (!(gamma_density > 0.0) || !std::isfinite(gamma_density)) {
    throw Error(ErrorCode::GammaOutOfRange, "density gamma must be positive and finite");
  }
  if (!data.values.allFinite()) throw Error(ErrorCode::NonFiniteInput, "dataset contains NaN or Inf");
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  Vector degree = Vector::Ones(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::exp(-gamma_density * (data.values.row(i) - data.values.row(j)).squaredNorm());
      degree(i) += w;
      degree(j) += w;
    }
  }
  Dataset out = data;
  out.values.conservativeResize(n, d + 1);
  out.values.col(d) = degree;
  if (!out.column_names.empty()) out.column_names.push_back("degree");
  return out;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::InvalidArgument, "label vectors differ in length");
  const double n = static_cast<double>(a.size());
  if (a.size() < 2) return 1.0;
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    table[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [key, m] : table) index += pairs(m);
  for (const auto& [key, m] : rows) sum_rows += pairs(m);
  for (const auto& [key, m] : cols) sum_cols += pairs(m);
  const double expected = sum_rows * sum_cols / pairs(n);
  const double max_index = 0.5 * (sum_rows + sum_cols);
  // Both partitions trivial (all singletons or one block): identical iff the
  // indices agree.
  if (max_index == expected) return index == expected ? 1.0 : 0.0;
  return (index - expected) / (max_index - expected);
}

}  // namespace bcvsc
