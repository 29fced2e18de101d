#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bcvsc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Samples x features table. Labels are optional and only used for scoring.
struct Dataset {
  Matrix values;
  std::vector<std::string> column_names;              // empty or one per column
  std::optional<std::vector<int>> truth_labels;
  std::optional<std::vector<int>> truth_labels_coarse;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }

  // Throws NonFiniteInput / InvalidArgument when an invariant is violated.
  void validate() const;
};

// m rows drawn without replacement, kept in their original order.
Dataset subsample_rows(const Dataset& data, Eigen::Index m, std::uint64_t seed);

// Each column shifted to zero mean and scaled to unit sample standard
// deviation; constant columns are only centred.
Dataset standardize_columns(const Dataset& data);

}  // namespace bcvsc
