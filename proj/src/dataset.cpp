#include "crkbs/dataset.hpp"

#include <string>

#include "crkbs/errors.hpp"

namespace crkbs {

Dataset Dataset::create(Eigen::MatrixXd X, std::optional<Eigen::MatrixXd> Y) {
  if (X.rows() == 0 || X.cols() == 0) {
    throw ContractError("dataset must have at least one sample and one feature");
  }
  if (!X.allFinite()) {
    throw DomainError("dataset inputs contain non-finite values");
  }
  // Value comparison (not bitwise), so 0.0 and -0.0 count as equal: rows
  // that agree as vectors produce identical kernel rows either way.
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < X.rows(); ++j) {
      if ((X.row(i).array() == X.row(j).array()).all()) {
        throw ContractError("duplicate input rows " + std::to_string(i) +
                            " and " + std::to_string(j));
      }
    }
  }
  if (Y.has_value()) {
    if (Y->rows() != X.rows()) {
      throw ContractError("targets have " + std::to_string(Y->rows()) +
                          " rows, inputs have " + std::to_string(X.rows()));
    }
    if (Y->cols() == 0) {
      throw ContractError("targets must have at least one column");
    }
    if (!Y->allFinite()) {
      throw DomainError("dataset targets contain non-finite values");
    }
  }
  Dataset d;
  d.X = std::move(X);
  d.Y = std::move(Y);
  return d;
}

}  // namespace crkbs
