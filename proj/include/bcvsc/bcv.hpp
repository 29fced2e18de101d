#pragma once

#include "bcvsc/dataset.hpp"
#include "bcvsc/graph.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bcvsc {

inline constexpr int kDefaultShuffles = 40;
inline constexpr double kPseudoinverseRtol = 1e-12;

// 2x2 equal-quadrant split of a (permuted) square matrix; `a` is the holdout.
struct QuadrantSplit {
  Matrix a, b, c, e;

  Eigen::Index half() const { return a.rows(); }
  Matrix reassemble() const;
};

// Applies `perm` to rows and columns simultaneously (out(i, j) = m(perm[i], perm[j])),
// drops the last row/column when n is odd, and splits into quadrants.
QuadrantSplit partition_with_permutation(const Matrix& matrix, std::span<const Eigen::Index> perm);

// Uniform random permutation drawn from `seed`, then partition_with_permutation.
QuadrantSplit shuffle_and_partition(const Matrix& matrix, std::uint64_t seed);

std::vector<Eigen::Index> random_permutation(Eigen::Index n, std::uint64_t seed);

// Pseudoinverse of the rank-k SVD truncation of `e`, formed as V_k S_k^+ U_k^T
// with singular values below kPseudoinverseRtol * sigma_max treated as zero.
Matrix truncated_pseudoinverse(const Matrix& e, int k);

// sum_ij (A - B (E_k)^+ C)_ij^2
double bcv_loss(const QuadrantSplit& split, int k);

// Mean BCV loss over `n_shuffles` shuffles; shuffle i uses derive_seed(seed, {i}).
double averaged_bcv(const Matrix& matrix, int k, int n_shuffles, std::uint64_t seed);
double averaged_bcv(const RegularizedInverseLaplacian& inv_laplacian, int k,
                    int n_shuffles = kDefaultShuffles, std::uint64_t seed = 0);

struct BcvProfile {
  std::vector<double> scores;
  std::vector<double> resolutions;  // mean rounding-error bound of each score
};

// averaged_bcv for several ranks over one shared set of shuffles; scores[j] is
// bitwise equal to averaged_bcv(matrix, k_values[j], n_shuffles, seed).
BcvProfile averaged_bcv_profile(const Matrix& matrix, std::span<const int> k_values, int n_shuffles,
                                         std::uint64_t seed);

// Individual per-shuffle losses behind averaged_bcv.
std::vector<double> per_shuffle_bcv(const Matrix& matrix, int k, int n_shuffles, std::uint64_t seed);

struct CellFailure {
  double gamma = 0.0;
  double xi = 0.0;
  std::string message;
};

struct BcvScoreGrid {
  std::vector<int> k_values;
  std::vector<double> gamma_values;
  std::vector<double> xi_values;
  std::vector<std::optional<double>> scores;  // index via cell_index()
  std::vector<double> resolutions;            // rounding-error bound per cell, same indexing
  int n_shuffles = kDefaultShuffles;
  std::uint64_t master_seed = 0;
  std::vector<CellFailure> failures;  // (gamma, xi) columns that could not be inverted

  std::size_t cell_index(std::size_t ki, std::size_t gi, std::size_t xi) const {
    return (xi * gamma_values.size() + gi) * k_values.size() + ki;
  }
  const std::optional<double>& score(std::size_t ki, std::size_t gi, std::size_t xi) const {
    return scores[cell_index(ki, gi, xi)];
  }
  std::size_t size() const { return k_values.size() * gamma_values.size() * xi_values.size(); }
  bool complete() const { return failures.empty(); }
};

struct GridOptions {
  unsigned threads = 0;  // 0 = hardware concurrency
  double inversion_tolerance = kDefaultInversionTolerance;
};

// Seeds for one (gamma, xi) column. Both derive from the master seed and the
// axis values, so a cell reproduces without the rest of the grid. All k in a
// column share the shuffle stream.
std::uint64_t haar_seed_for(std::uint64_t master_seed, double gamma, double xi);
std::uint64_t shuffle_seed_for(std::uint64_t master_seed, double gamma, double xi);

BcvScoreGrid score_grid(const Dataset& data, std::span<const int> k_values,
                        std::span<const double> gamma_values, std::span<const double> xi_values,
                        int n_shuffles, std::uint64_t master_seed, const GridOptions& options = {});

// Recomputes one cell the way score_grid does.
double score_cell(const Dataset& data, int k, double gamma, double xi, int n_shuffles,
                  std::uint64_t master_seed, double inversion_tolerance = kDefaultInversionTolerance);

struct GridMinimum {
  int k = 0;
  double gamma = 0.0;
  double xi = 0.0;
  double score = 0.0;
  bool on_boundary = false;

  double sigma() const { return sigma_from_gamma(gamma); }
};

// Local minima over 4-neighbourhoods in the (k, gamma) plane of each xi slice,
// sorted by ascending score. Plateaus of equal minima collapse to the
// lexicographically smallest (k, gamma).
std::vector<GridMinimum> find_minima(const BcvScoreGrid& grid);

// Smallest-score k for a fixed (gamma, xi) column; nullopt if the column is missing.
std::optional<int> argmin_k(const BcvScoreGrid& grid, std::size_t gi, std::size_t xi);

// Like argmin_k, but scores within the summed rounding-error bounds of the
// minimum count as ties, resolved toward the smallest k.
std::optional<int> resolved_argmin_k(const BcvScoreGrid& grid, std::size_t gi, std::size_t xi);

}  // namespace bcvsc
