#include "crkbs/network.hpp"

#include <string>

#include "crkbs/errors.hpp"

namespace crkbs {

int DeepNetwork::input_dim() const {
  if (hidden_W.empty()) {
    throw ContractError("network has no hidden layers");
  }
  return static_cast<int>(hidden_W[0].cols());
}

std::vector<int> DeepNetwork::widths() const {
  std::vector<int> w;
  w.push_back(input_dim());
  for (const auto& W : hidden_W) {
    w.push_back(static_cast<int>(W.rows()));
  }
  return w;
}

void DeepNetwork::validate() const {
  if (hidden_W.empty()) {
    throw ContractError("network needs at least one hidden layer");
  }
  if (biases.size() != hidden_W.size()) {
    throw ContractError("network has " + std::to_string(hidden_W.size()) +
                        " weight matrices but " +
                        std::to_string(biases.size()) + " bias vectors");
  }
  if (activations.size() != hidden_W.size()) {
    throw ContractError("network needs one activation per hidden layer");
  }
  for (std::size_t l = 0; l < hidden_W.size(); ++l) {
    if (hidden_W[l].rows() == 0 || hidden_W[l].cols() == 0) {
      throw ContractError("layer " + std::to_string(l + 1) +
                          " has an empty weight matrix");
    }
    if (biases[l].size() != hidden_W[l].rows()) {
      throw ContractError("layer " + std::to_string(l + 1) +
                          " bias length does not match its width");
    }
    if (l + 1 < hidden_W.size() &&
        hidden_W[l + 1].cols() != hidden_W[l].rows()) {
      throw ContractError("layer " + std::to_string(l + 2) +
                          " input width does not match layer " +
                          std::to_string(l + 1) + " output width");
    }
    if (!hidden_W[l].allFinite() || !biases[l].allFinite()) {
      throw DomainError("layer " + std::to_string(l + 1) +
                        " has non-finite parameters");
    }
  }
  if (final_W.rows() == 0) {
    throw ContractError("network output dimension must be positive");
  }
  if (final_W.cols() != hidden_W.back().rows()) {
    throw ContractError("final layer input width does not match last hidden width");
  }
  if (!final_W.allFinite()) {
    throw DomainError("final layer has non-finite parameters");
  }
}

Eigen::VectorXd DeepNetwork::forward(const Eigen::VectorXd& x) const {
  if (x.size() != hidden_W[0].cols()) {
    throw ContractError("input has dimension " + std::to_string(x.size()) +
                        ", network expects " +
                        std::to_string(hidden_W[0].cols()));
  }
  Eigen::VectorXd h = x;
  for (std::size_t l = 0; l < hidden_W.size(); ++l) {
    Eigen::VectorXd pre = hidden_W[l] * h + biases[l];
    h.resize(pre.size());
    for (Eigen::Index k = 0; k < pre.size(); ++k) {
      h[k] = eval_activation(activations[l], pre[k]);
    }
  }
  return final_W * h;
}

Eigen::MatrixXd DeepNetwork::forward_batch(const Eigen::MatrixXd& X) const {
  Eigen::MatrixXd out(X.rows(), final_W.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out.row(i) = forward(X.row(i).transpose()).transpose();
  }
  return out;
}

}  // namespace crkbs
