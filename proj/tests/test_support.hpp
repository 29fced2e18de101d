#pragma once

// Shared helpers and independent oracles for the unit and acceptance tests.

#include "bcvsc/bcv.hpp"
#include "bcvsc/dataset.hpp"
#include "bcvsc/error.hpp"
#include "bcvsc/seeding.hpp"

#include <Eigen/SVD>

#include <optional>
#include <random>

namespace bcvsc::test {

template <class Fn>
std::optional<ErrorCode> error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

inline Matrix random_symmetric(Eigen::Index n, Rng& rng) {
  const Matrix m = random_matrix(n, n, rng);
  return 0.5 * (m + m.transpose());
}

// Sum of r outer products u_i v_i^T with Gaussian factors.
inline Matrix random_low_rank(Eigen::Index n, int r, Rng& rng) {
  return random_matrix(n, r, rng) * random_matrix(r, n, rng);
}

// Moore-Penrose pseudoinverse of an explicit matrix by full SVD, with the
// same relative cutoff the engine uses.
inline Matrix pinv_oracle(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double cutoff = kPseudoinverseRtol * (s.size() ? s(0) : 0.0);
  Matrix sinv = Matrix::Zero(m.cols(), m.rows());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) sinv(i, i) = 1.0 / s(i);
  return svd.matrixV() * sinv * svd.matrixU().transpose();
}

// Rank-k reconstruction of E, then its pseudoinverse.
inline Matrix two_step_truncated_pinv(const Matrix& e, int k) {
  Eigen::JacobiSVD<Matrix> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector s = svd.singularValues();
  for (Eigen::Index i = k; i < s.size(); ++i) s(i) = 0.0;
  const Matrix ek = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  return pinv_oracle(ek);
}

// Literal loss: sum over entries of (A - B pinv(E_k) C)^2, by explicit loops.
inline double literal_bcv_loss(const Matrix& source, int k) {
  const Eigen::Index h = source.rows() / 2;
  Matrix a(h, h), b(h, h), c(h, h), e(h, h);
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < h; ++j) {
      a(i, j) = source(i, j);
      b(i, j) = source(i, h + j);
      c(i, j) = source(h + i, j);
      e(i, j) = source(h + i, h + j);
    }
  }
  const Matrix p = two_step_truncated_pinv(e, k);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < h; ++i) {
    for (Eigen::Index j = 0; j < h; ++j) {
      double pred = 0.0;
      for (Eigen::Index x = 0; x < h; ++x)
        for (Eigen::Index y = 0; y < h; ++y) pred += b(i, x) * p(x, y) * c(y, j);
      const double r = a(i, j) - pred;
      loss += r * r;
    }
  }
  return loss;
}

inline QuadrantSplit identity_split(const Matrix& m) {
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(m.rows()));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Eigen::Index>(i);
  return partition_with_permutation(m, perm);
}

}  // namespace bcvsc::test

namespace bcvsc {
using test::error_code_of;
using test::random_matrix;
}  // namespace bcvsc
