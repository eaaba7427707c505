#pragma once

#include <Eigen/Dense>
#include <vector>

#include "crkbs/types.hpp"

namespace crkbs {

// Fully connected feed-forward network with L hidden layers:
//   h^0 = x
//   h^l = sigma_l(W^{l-1} h^{l-1} + b^l),  l = 1..L
//   out = final_W h^L
// hidden_W[l-1] is W^{l-1} (widths[l] x widths[l-1]), biases[l-1] is b^l,
// final_W is output_dim x widths[L]. The same activation list drives every
// evaluation, one entry per hidden layer.
struct DeepNetwork {
  std::vector<Eigen::MatrixXd> hidden_W;
  std::vector<Eigen::VectorXd> biases;
  Eigen::MatrixXd final_W;
  std::vector<ActivationSpec> activations;

  int depth() const { return static_cast<int>(hidden_W.size()); }
  int input_dim() const;
  int output_dim() const { return static_cast<int>(final_W.rows()); }
  std::vector<int> widths() const;

  // Shape and finiteness checks; throws ContractError/DomainError.
  void validate() const;

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  // Row i of the result is forward(X.row(i)).
  Eigen::MatrixXd forward_batch(const Eigen::MatrixXd& X) const;
};

}  // namespace crkbs
