#include "bcvsc/dataset.hpp"

#include "bcvsc/error.hpp"
#include "bcvsc/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bcvsc {

void Dataset::validate() const {
  if (values.rows() < 2 || values.cols() < 1) {
    throw Error(ErrorCode::InvalidArgument, "dataset needs at least 2 rows and 1 column");
  }
  if (!values.allFinite()) {
    throw Error(ErrorCode::NonFiniteInput, "dataset contains NaN or Inf");
  }
  if (!column_names.empty() && static_cast<Eigen::Index>(column_names.size()) != values.cols()) {
    throw Error(ErrorCode::InvalidArgument, "column_names length does not match column count");
  }
  for (const auto* labels : {&truth_labels, &truth_labels_coarse}) {
    if (!labels->has_value()) continue;
    if (static_cast<Eigen::Index>((*labels)->size()) != values.rows()) {
      throw Error(ErrorCode::InvalidArgument, "truth labels length does not match row count");
    }
    for (int l : **labels) {
      if (l < 0) throw Error(ErrorCode::InvalidArgument, "truth labels must be non-negative");
    }
  }
}

Dataset subsample_rows(const Dataset& data, Eigen::Index m, std::uint64_t seed) {
  const Eigen::Index n = data.rows();
  if (m < 1 || m > n) throw Error(ErrorCode::InvalidArgument, "subsample size must be in [1, rows]");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());

  Dataset out;
  out.column_names = data.column_names;
  out.values.resize(m, data.cols());
  for (Eigen::Index i = 0; i < m; ++i) out.values.row(i) = data.values.row(idx[static_cast<std::size_t>(i)]);
  auto pick = [&](const std::optional<std::vector<int>>& labels) -> std::optional<std::vector<int>> {
    if (!labels) return std::nullopt;
    std::vector<int> kept;
    kept.reserve(idx.size());
    for (auto i : idx) kept.push_back((*labels)[static_cast<std::size_t>(i)]);
    return kept;
  };
  out.truth_labels = pick(data.truth_labels);
  out.truth_labels_coarse = pick(data.truth_labels_coarse);
  return out;
}

Dataset standardize_columns(const Dataset& data) {
  Dataset out = data;
  const auto n = static_cast<double>(data.rows());
  for (Eigen::Index j = 0; j < data.cols(); ++j) {
    auto col = out.values.col(j);
    col.array() -= col.mean();
    const double sd = n > 1 ? std::sqrt(col.squaredNorm() / (n - 1)) : 0.0;
    if (sd > 0.0) col /= sd;
  }
  return out;
}

}  // namespace bcvsc
