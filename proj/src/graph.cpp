#include "bcvsc/graph.hpp"

#include "bcvsc/error.hpp"
#include "bcvsc/seeding.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace bcvsc {

namespace {

using Quad = boost::multiprecision::float128;
using QuadMatrix = Eigen::Matrix<Quad, Eigen::Dynamic, Eigen::Dynamic>;

constexpr double kSymmetryTolerance = 1e-12;

}  // namespace

double sigma_from_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::GammaOutOfRange, "gamma must be positive and finite");
  }
  return 1.0 / std::sqrt(2.0 * gamma);
}

double gamma_from_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidArgument, "sigma must be positive and finite");
  }
  return 1.0 / (2.0 * sigma * sigma);
}

double KernelParams::sigma() const { return sigma_from_gamma(gamma); }

void KernelParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma) || !std::isfinite(sigma())) {
    throw Error(ErrorCode::GammaOutOfRange, "gamma must be positive with finite sigma");
  }
  if (!(xi >= 0.0) || !std::isfinite(xi)) {
    throw Error(ErrorCode::InvalidArgument, "xi must be non-negative and finite");
  }
}

AffinityGraph rbf_weight_matrix(const Dataset& data, double gamma) {
  if (!data.values.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, "dataset contains NaN or Inf");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::GammaOutOfRange, "gamma must be positive and finite");
  }
  data.validate();

  const Eigen::Index n = data.rows();
  const Matrix& x = data.values;
  AffinityGraph graph;
  graph.weights.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    graph.weights(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double w = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
      graph.weights(i, j) = w;
      graph.weights(j, i) = w;
    }
  }
  graph.degrees = degree_matrix(graph);
  return graph;
}

AffinityGraph affinity_from_weights(const Matrix& weights) {
  if (weights.rows() != weights.cols() || weights.rows() == 0) {
    throw Error(ErrorCode::InvalidArgument, "weight matrix must be square and non-empty");
  }
  if (!weights.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, "weight matrix contains NaN or Inf");
  }
  if ((weights - weights.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance) {
    throw Error(ErrorCode::InvalidArgument, "weight matrix is not symmetric");
  }
  AffinityGraph graph{weights, Vector()};
  graph.degrees = degree_matrix(graph);
  return graph;
}

Vector degree_matrix(const AffinityGraph& graph) { return graph.weights.rowwise().sum(); }

Matrix unnormalized_laplacian(const AffinityGraph& graph) {
  Matrix lap = -graph.weights;
  lap.diagonal() += graph.degrees;
  return lap;
}

NormalizedLaplacian normalized_laplacian(const AffinityGraph& graph) {
  const Eigen::Index n = graph.weights.rows();
  if (graph.degrees.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "degree vector length does not match weights");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(graph.degrees(i) > 0.0)) {
      std::ostringstream msg;
      msg << "degree of vertex " << i << " is " << graph.degrees(i);
      throw Error(ErrorCode::ZeroDegree, msg.str());
    }
  }
  const Vector inv_sqrt = graph.degrees.cwiseSqrt().cwiseInverse();
  NormalizedLaplacian out;
  out.matrix = -(inv_sqrt.asDiagonal() * graph.weights * inv_sqrt.asDiagonal());
  out.matrix.diagonal().array() += 1.0;
  // Exact symmetry; the two triangles can differ in the last bit otherwise.
  out.matrix = (0.5 * (out.matrix + out.matrix.transpose())).eval();
  return out;
}

Matrix haar_orthogonal(Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "haar_orthogonal needs n >= 1");
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(n, n);
  // Column-major fill keeps the stream layout independent of Eigen internals.
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = normal(rng);

  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

RegularizedInverseLaplacian regularized_inverse(const NormalizedLaplacian& laplacian, double xi,
                                                std::uint64_t seed, double tolerance) {
  if (!(xi > 0.0) || !std::isfinite(xi)) {
    throw Error(ErrorCode::SingularAfterRegularization,
                "xi must be positive; the normalized Laplacian is singular");
  }
  const Matrix& ln = laplacian.matrix;
  const Eigen::Index n = ln.rows();
  if (n != ln.cols() || n == 0) {
    throw Error(ErrorCode::InvalidArgument, "Laplacian must be square and non-empty");
  }

  const Matrix h = haar_orthogonal(n, seed);
  const Matrix reg = h - h.transpose() * ln * h;

  // xi * R is many orders below L_n, so the sum has to be formed in quad.
  const QuadMatrix lr = ln.cast<Quad>() + Quad(xi) * reg.cast<Quad>();
  Eigen::PartialPivLU<QuadMatrix> lu(lr);
  const QuadMatrix inv = lu.inverse();

  RegularizedInverseLaplacian out;
  out.xi_used = xi;
  out.haar_seed = seed;

  bool finite = true;
  for (Eigen::Index j = 0; j < n && finite; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (!boost::multiprecision::isfinite(inv(i, j))) {
        finite = false;
        break;
      }
  if (!finite) {
    throw Error(ErrorCode::SingularAfterRegularization,
                "LU solve produced non-finite entries; increase xi");
  }

  QuadMatrix prod = lr * inv;
  prod.diagonal().array() -= Quad(1);
  out.inversion_residual = static_cast<double>(prod.cwiseAbs().maxCoeff());
  const Quad norm_lr = lr.cwiseAbs().colwise().sum().maxCoeff();
  const Quad norm_inv = inv.cwiseAbs().colwise().sum().maxCoeff();
  out.condition_estimate = static_cast<double>(norm_lr * norm_inv);

  if (!(out.inversion_residual <= tolerance)) {
    std::ostringstream msg;
    msg << "inversion residual " << out.inversion_residual << " exceeds tolerance " << tolerance
        << " at xi=" << xi << "; increase xi";
    throw Error(ErrorCode::SingularAfterRegularization, msg.str());
  }
  out.matrix = inv.cast<double>();
  return out;
}

}  // namespace bcvsc
