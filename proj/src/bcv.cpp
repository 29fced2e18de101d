#include "bcvsc/bcv.hpp"

#include "bcvsc/error.hpp"
#include "bcvsc/parallel.hpp"
#include "bcvsc/seeding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace bcvsc {

namespace {

constexpr std::uint64_t kHaarTag = 0x48414152;     // "HAAR"
constexpr std::uint64_t kShuffleTag = 0x53485546;  // "SHUF"

struct TruncatedFactors {
  Matrix v_scaled;  // V_k S_k^+
  Matrix u;         // U_k
};

using Svd = Eigen::JacobiSVD<Matrix>;

void check_rank(Eigen::Index h, int k) {
  if (k < 1 || k > h) {
    std::ostringstream msg;
    msg << "rank " << k << " outside [1, " << h << "]";
    throw Error(ErrorCode::RankOutOfRange, msg.str());
  }
}

Svd decompose(const Matrix& e) {
  if (e.cols() != e.rows()) throw Error(ErrorCode::InvalidArgument, "E block must be square");
  return Svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
}

TruncatedFactors truncated_factors(const Svd& svd, int k) {
  check_rank(svd.rows(), k);
  const Vector& s = svd.singularValues();
  const double cutoff = kPseudoinverseRtol * (s.size() > 0 ? s(0) : 0.0);
  // Directions below the cutoff contribute exactly zero, so they are dropped
  // rather than carried as zero columns; every k past the numerical rank then
  // evaluates the identical expression.
  int kept = 0;
  while (kept < k && s(kept) > cutoff && s(kept) > 0.0) ++kept;
  TruncatedFactors f;
  f.v_scaled = svd.matrixV().leftCols(kept) * s.head(kept).cwiseInverse().asDiagonal();
  f.u = svd.matrixU().leftCols(kept);
  return f;
}

struct LossEstimate {
  double loss;
  double resolution;
};

// Loss plus a first-order bound on its rounding error. The residual
// A - B E^+ C cancels entries of size ~||A||, so each residual entry carries
// an error of roughly eps * sqrt(h) * (|A| + |P|); the loss inherits
// 2 ||r|| ||delta r||.
LossEstimate loss_from_svd(const QuadrantSplit& split, const Svd& svd, int k) {
  const TruncatedFactors f = truncated_factors(svd, k);
  const Matrix left = split.b * f.v_scaled;
  const Matrix right = f.u.transpose() * split.c;
  const Matrix prediction = left * right;
  const double residual_norm = (split.a - prediction).norm();
  const double entry_error = std::numeric_limits<double>::epsilon() *
                             std::sqrt(static_cast<double>(split.half())) *
                             (split.a.norm() + prediction.norm());
  return {residual_norm * residual_norm, 2.0 * residual_norm * entry_error};
}

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

void check_axis_positive(std::span<const double> axis, const char* name) {
  if (axis.empty()) throw Error(ErrorCode::InvalidArgument, std::string(name) + " axis is empty");
  for (double v : axis) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " values must be positive");
    }
  }
}

}  // namespace

Matrix QuadrantSplit::reassemble() const {
  const Eigen::Index h = half();
  Matrix m(2 * h, 2 * h);
  m << a, b, c, e;
  return m;
}

std::vector<Eigen::Index> random_permutation(Eigen::Index n, std::uint64_t seed) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

QuadrantSplit partition_with_permutation(const Matrix& matrix, std::span<const Eigen::Index> perm) {
  const Eigen::Index n = matrix.rows();
  if (matrix.cols() != n) throw Error(ErrorCode::InvalidArgument, "matrix must be square");
  if (n < 4) throw Error(ErrorCode::TooSmall, "BCV partition needs n >= 4");
  if (static_cast<Eigen::Index>(perm.size()) != n) {
    throw Error(ErrorCode::InvalidArgument, "permutation length does not match matrix");
  }
  const Eigen::Index h = n / 2;
  auto take = [&](Eigen::Index row0, Eigen::Index col0) {
    Matrix block(h, h);
    for (Eigen::Index j = 0; j < h; ++j)
      for (Eigen::Index i = 0; i < h; ++i) block(i, j) = matrix(perm[row0 + i], perm[col0 + j]);
    return block;
  };
  return QuadrantSplit{take(0, 0), take(0, h), take(h, 0), take(h, h)};
}

QuadrantSplit shuffle_and_partition(const Matrix& matrix, std::uint64_t seed) {
  if (matrix.rows() < 4) throw Error(ErrorCode::TooSmall, "BCV partition needs n >= 4");
  const auto perm = random_permutation(matrix.rows(), seed);
  return partition_with_permutation(matrix, perm);
}

Matrix truncated_pseudoinverse(const Matrix& e, int k) {
  check_rank(e.rows(), k);
  const TruncatedFactors f = truncated_factors(decompose(e), k);
  return f.v_scaled * f.u.transpose();
}

double bcv_loss(const QuadrantSplit& split, int k) {
  check_rank(split.e.rows(), k);
  return loss_from_svd(split, decompose(split.e), k).loss;
}

std::vector<double> per_shuffle_bcv(const Matrix& matrix, int k, int n_shuffles, std::uint64_t seed) {
  if (n_shuffles < 1) throw Error(ErrorCode::InvalidArgument, "n_shuffles must be positive");
  std::vector<double> losses(static_cast<std::size_t>(n_shuffles));
  for (int i = 0; i < n_shuffles; ++i) {
    const QuadrantSplit split =
        shuffle_and_partition(matrix, derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    losses[static_cast<std::size_t>(i)] = bcv_loss(split, k);
  }
  return losses;
}

double averaged_bcv(const Matrix& matrix, int k, int n_shuffles, std::uint64_t seed) {
  const auto losses = per_shuffle_bcv(matrix, k, n_shuffles, seed);
  double sum = 0.0;
  for (double l : losses) sum += l;
  return sum / static_cast<double>(losses.size());
}

double averaged_bcv(const RegularizedInverseLaplacian& inv_laplacian, int k, int n_shuffles,
                    std::uint64_t seed) {
  return averaged_bcv(inv_laplacian.matrix, k, n_shuffles, seed);
}

BcvProfile averaged_bcv_profile(const Matrix& matrix, std::span<const int> k_values, int n_shuffles,
                                std::uint64_t seed) {
  if (n_shuffles < 1) throw Error(ErrorCode::InvalidArgument, "n_shuffles must be positive");
  if (matrix.rows() < 4) throw Error(ErrorCode::TooSmall, "BCV partition needs n >= 4");
  for (int k : k_values) check_rank(matrix.rows() / 2, k);
  // Same accumulation order as averaged_bcv, so scores match it bitwise.
  const std::size_t nk = k_values.size();
  std::vector<std::vector<double>> losses(nk, std::vector<double>(static_cast<std::size_t>(n_shuffles)));
  std::vector<double> resolution_sum(nk, 0.0);
  for (int i = 0; i < n_shuffles; ++i) {
    const QuadrantSplit split =
        shuffle_and_partition(matrix, derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    const Svd svd = decompose(split.e);
    for (std::size_t j = 0; j < nk; ++j) {
      const LossEstimate est = loss_from_svd(split, svd, k_values[j]);
      losses[j][static_cast<std::size_t>(i)] = est.loss;
      resolution_sum[j] += est.resolution;
    }
  }
  BcvProfile out;
  out.scores.resize(nk);
  out.resolutions.resize(nk);
  for (std::size_t j = 0; j < nk; ++j) {
    double sum = 0.0;
    for (double l : losses[j]) sum += l;
    out.scores[j] = sum / static_cast<double>(n_shuffles);
    out.resolutions[j] = resolution_sum[j] / static_cast<double>(n_shuffles);
  }
  return out;
}

std::uint64_t haar_seed_for(std::uint64_t master_seed, double gamma, double xi) {
  return derive_seed(master_seed, {kHaarTag, bits(gamma), bits(xi)});
}

std::uint64_t shuffle_seed_for(std::uint64_t master_seed, double gamma, double xi) {
  return derive_seed(master_seed, {kShuffleTag, bits(gamma), bits(xi)});
}

BcvScoreGrid score_grid(const Dataset& data, std::span<const int> k_values,
                        std::span<const double> gamma_values, std::span<const double> xi_values,
                        int n_shuffles, std::uint64_t master_seed, const GridOptions& options) {
  data.validate();
  if (k_values.empty()) throw Error(ErrorCode::InvalidArgument, "k axis is empty");
  check_axis_positive(gamma_values, "gamma");
  check_axis_positive(xi_values, "xi");
  if (n_shuffles < 1) throw Error(ErrorCode::InvalidArgument, "n_shuffles must be positive");
  const int half = static_cast<int>(data.rows() / 2);
  if (data.rows() < 4) throw Error(ErrorCode::TooSmall, "score_grid needs at least 4 samples");
  for (int k : k_values) {
    if (k < 1 || k > half) {
      std::ostringstream msg;
      msg << "k=" << k << " outside [1, floor(n/2)=" << half << "]";
      throw Error(ErrorCode::RankOutOfRange, msg.str());
    }
  }

  BcvScoreGrid grid;
  grid.k_values.assign(k_values.begin(), k_values.end());
  grid.gamma_values.assign(gamma_values.begin(), gamma_values.end());
  grid.xi_values.assign(xi_values.begin(), xi_values.end());
  grid.n_shuffles = n_shuffles;
  grid.master_seed = master_seed;
  grid.scores.assign(grid.size(), std::nullopt);
  grid.resolutions.assign(grid.size(), 0.0);

  const std::size_t nk = k_values.size();
  const std::size_t ng = gamma_values.size();
  const std::size_t nx = xi_values.size();

  // Laplacians depend on gamma only.
  std::vector<NormalizedLaplacian> laplacians(ng);
  parallel_for(ng, options.threads, [&](std::size_t gi) {
    laplacians[gi] = normalized_laplacian(rbf_weight_matrix(data, gamma_values[gi]));
  });

  std::vector<std::optional<Matrix>> inverses(ng * nx);
  std::vector<std::string> errors(ng * nx);
  parallel_for(ng * nx, options.threads, [&](std::size_t col) {
    const std::size_t gi = col % ng;
    const std::size_t xi = col / ng;
    try {
      inverses[col] = regularized_inverse(laplacians[gi], xi_values[xi],
                                          haar_seed_for(master_seed, gamma_values[gi], xi_values[xi]),
                                          options.inversion_tolerance)
                          .matrix;
    } catch (const Error& err) {
      if (err.code() != ErrorCode::SingularAfterRegularization) throw;
      errors[col] = err.what();
    }
  });

  parallel_for(ng * nx, options.threads, [&](std::size_t col) {
    if (!inverses[col]) return;
    const std::size_t gi = col % ng;
    const std::size_t xi = col / ng;
    const auto profile = averaged_bcv_profile(*inverses[col], k_values, n_shuffles,
                                              shuffle_seed_for(master_seed, gamma_values[gi], xi_values[xi]));
    for (std::size_t ki = 0; ki < nk; ++ki) {
      grid.scores[col * nk + ki] = profile.scores[ki];
      grid.resolutions[col * nk + ki] = profile.resolutions[ki];
    }
  });

  for (std::size_t col = 0; col < ng * nx; ++col) {
    if (!inverses[col]) {
      grid.failures.push_back({gamma_values[col % ng], xi_values[col / ng], errors[col]});
    }
  }
  return grid;
}

double score_cell(const Dataset& data, int k, double gamma, double xi, int n_shuffles,
                  std::uint64_t master_seed, double inversion_tolerance) {
  const auto lap = normalized_laplacian(rbf_weight_matrix(data, gamma));
  const auto inv = regularized_inverse(lap, xi, haar_seed_for(master_seed, gamma, xi), inversion_tolerance);
  return averaged_bcv(inv, k, n_shuffles, shuffle_seed_for(master_seed, gamma, xi));
}

std::optional<int> argmin_k(const BcvScoreGrid& grid, std::size_t gi, std::size_t xi) {
  std::optional<int> best;
  double best_score = 0.0;
  for (std::size_t ki = 0; ki < grid.k_values.size(); ++ki) {
    const auto& s = grid.score(ki, gi, xi);
    if (!s) return std::nullopt;
    if (!best || *s < best_score) {
      best = grid.k_values[ki];
      best_score = *s;
    }
  }
  return best;
}

std::optional<int> resolved_argmin_k(const BcvScoreGrid& grid, std::size_t gi, std::size_t xi) {
  const std::size_t nk = grid.k_values.size();
  std::optional<std::size_t> best;
  for (std::size_t ki = 0; ki < nk; ++ki) {
    const auto& s = grid.score(ki, gi, xi);
    if (!s) return std::nullopt;
    if (!best || *s < *grid.score(*best, gi, xi)) best = ki;
  }
  if (!best) return std::nullopt;
  const double best_score = *grid.score(*best, gi, xi);
  const double best_res = grid.resolutions.empty() ? 0.0 : grid.resolutions[grid.cell_index(*best, gi, xi)];
  for (std::size_t ki = 0; ki < nk; ++ki) {
    const double res = grid.resolutions.empty() ? 0.0 : grid.resolutions[grid.cell_index(ki, gi, xi)];
    if (*grid.score(ki, gi, xi) - best_score <= res + best_res) return grid.k_values[ki];
  }
  return grid.k_values[*best];
}

std::vector<GridMinimum> find_minima(const BcvScoreGrid& grid) {
  const std::size_t nk = grid.k_values.size();
  const std::size_t ng = grid.gamma_values.size();
  const std::size_t nx = grid.xi_values.size();
  if (grid.size() == 0 || grid.scores.size() != grid.size()) {
    throw Error(ErrorCode::EmptyGrid, "grid has no cells");
  }
  bool any_full_slice = false;
  for (std::size_t x = 0; x < nx && !any_full_slice; ++x) {
    bool full = true;
    for (std::size_t g = 0; g < ng && full; ++g)
      for (std::size_t k = 0; k < nk && full; ++k) full = grid.score(k, g, x).has_value();
    any_full_slice = full;
  }
  if (!any_full_slice) throw Error(ErrorCode::EmptyGrid, "no xi slice is fully populated");

  std::vector<GridMinimum> out;
  for (std::size_t x = 0; x < nx; ++x) {
    auto value = [&](std::ptrdiff_t k, std::ptrdiff_t g) -> std::optional<double> {
      if (k < 0 || g < 0 || k >= static_cast<std::ptrdiff_t>(nk) || g >= static_cast<std::ptrdiff_t>(ng)) {
        return std::nullopt;
      }
      return grid.score(static_cast<std::size_t>(k), static_cast<std::size_t>(g), x);
    };
    constexpr std::ptrdiff_t dk[4] = {-1, 1, 0, 0};
    constexpr std::ptrdiff_t dg[4] = {0, 0, -1, 1};

    std::vector<char> is_min(nk * ng, 0);
    for (std::size_t g = 0; g < ng; ++g) {
      for (std::size_t k = 0; k < nk; ++k) {
        const auto s = value(k, g);
        if (!s) continue;
        bool ok = true;
        for (int d = 0; d < 4 && ok; ++d) {
          const auto nb = value(static_cast<std::ptrdiff_t>(k) + dk[d], static_cast<std::ptrdiff_t>(g) + dg[d]);
          if (nb && *nb < *s) ok = false;
        }
        is_min[g * nk + k] = ok;
      }
    }
    // Plateau dedup: flood-fill equal-valued neighbouring minima, keep the
    // first cell in (k, gamma) order.
    std::vector<char> seen(nk * ng, 0);
    for (std::size_t k = 0; k < nk; ++k) {
      for (std::size_t g = 0; g < ng; ++g) {
        const std::size_t id = g * nk + k;
        if (!is_min[id] || seen[id]) continue;
        const double s = *value(k, g);
        std::vector<std::size_t> stack{id};
        seen[id] = 1;
        while (!stack.empty()) {
          const std::size_t cur = stack.back();
          stack.pop_back();
          const auto ck = static_cast<std::ptrdiff_t>(cur % nk);
          const auto cg = static_cast<std::ptrdiff_t>(cur / nk);
          for (int d = 0; d < 4; ++d) {
            const auto nk2 = ck + dk[d];
            const auto ng2 = cg + dg[d];
            const auto nb = value(nk2, ng2);
            if (!nb || *nb != s) continue;
            const std::size_t nid = static_cast<std::size_t>(ng2) * nk + static_cast<std::size_t>(nk2);
            if (is_min[nid] && !seen[nid]) {
              seen[nid] = 1;
              stack.push_back(nid);
            }
          }
        }
        const bool k_edge = nk > 1 && (k == 0 || k + 1 == nk);
        const bool g_edge = ng > 1 && (g == 0 || g + 1 == ng);
        out.push_back({grid.k_values[k], grid.gamma_values[g], grid.xi_values[x], s, k_edge || g_edge});
      }
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GridMinimum& l, const GridMinimum& r) { return l.score < r.score; });
  return out;
}

}  // namespace bcvsc
