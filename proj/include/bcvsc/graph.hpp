#pragma once

#include "bcvsc/dataset.hpp"

#include <cstdint>

namespace bcvsc {

// RBF precision `gamma` and regularization strength `xi`.
struct KernelParams {
  double gamma = 1.0;
  double xi = 0.0;

  // Characteristic length scale, gamma = 1 / (2 sigma^2).
  double sigma() const;
  void validate() const;
};

double sigma_from_gamma(double gamma);
double gamma_from_sigma(double sigma);

struct AffinityGraph {
  Matrix weights;  // symmetric, unit diagonal
  Vector degrees;  // row sums of weights
};

struct NormalizedLaplacian {
  Matrix matrix;  // I - D^{-1/2} W D^{-1/2}
};

struct RegularizedInverseLaplacian {
  Matrix matrix;
  double inversion_residual = 0.0;  // max |L_r * L_r^{-1} - I|, evaluated in extended precision
  double condition_estimate = 0.0;  // ||L_r||_1 * ||L_r^{-1}||_1
  double xi_used = 0.0;
  std::uint64_t haar_seed = 0;
};

inline constexpr double kDefaultInversionTolerance = 1e-6;

// W_ij = exp(-gamma * |x_i - x_j|^2) with degrees from row sums.
AffinityGraph rbf_weight_matrix(const Dataset& data, double gamma);

// Wraps an externally supplied weight matrix; checks symmetry and finiteness.
AffinityGraph affinity_from_weights(const Matrix& weights);

Vector degree_matrix(const AffinityGraph& graph);

// D - W. Row sums vanish up to rounding.
Matrix unnormalized_laplacian(const AffinityGraph& graph);

NormalizedLaplacian normalized_laplacian(const AffinityGraph& graph);

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
// columns of Q rescaled by sign(diag(R)).
Matrix haar_orthogonal(Eigen::Index n, std::uint64_t seed);

// (L_n + xi (H - H^T L_n H))^{-1}. The solve runs in quad precision because
// the regularized operator has condition number of order 1/xi; the result is
// rounded to double afterwards.
RegularizedInverseLaplacian regularized_inverse(const NormalizedLaplacian& laplacian, double xi,
                                                std::uint64_t seed,
                                                double tolerance = kDefaultInversionTolerance);

}  // namespace bcvsc
