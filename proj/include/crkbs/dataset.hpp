#pragma once

#include <Eigen/Dense>
#include <optional>

namespace crkbs {

// Sample matrix X (N x d, one point per row) with optional targets
// Y (N x D). Rows of X must be pairwise distinct; duplicates are rejected
// at construction with the offending row numbers.
struct Dataset {
  Eigen::MatrixXd X;
  std::optional<Eigen::MatrixXd> Y;

  static Dataset create(Eigen::MatrixXd X,
                        std::optional<Eigen::MatrixXd> Y = std::nullopt);

  Eigen::Index size() const { return X.rows(); }
  Eigen::Index input_dim() const { return X.cols(); }
};

}  // namespace crkbs
