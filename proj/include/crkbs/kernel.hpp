#pragma once

#include <Eigen/Dense>
#include <unordered_map>
#include <vector>

#include "crkbs/registry.hpp"
#include "crkbs/types.hpp"

namespace crkbs {

// Feature value of a first-layer atom: sigma(<v, x> + b) * beta(v, b).
double kernel_layer1(const Eigen::VectorXd& x, const Layer1Atom& atom,
                     const ActivationSpec& act, const WeightingSpec& wgt);

// Evaluates interned chain functions with memoization over the shared-
// subfunction graph. The cache is keyed by function id and valid for one
// input point; feeding a different x resets it automatically.
class Evaluator {
 public:
  explicit Evaluator(const Registry& registry) : registry_(&registry) {}

  double eval(const FunctionId& id, const Eigen::VectorXd& x);
  double eval(const ChainFunctionData& fn, const Eigen::VectorXd& x);

  const Registry& registry() const { return *registry_; }

 private:
  const Registry* registry_;
  Eigen::VectorXd current_x_;
  bool has_x_ = false;
  std::unordered_map<FunctionId, double> cache_;
};

// Feature value of a chain atom: sigma(f(x) + b) * beta(f, b), where the
// weighting sees nu(f) = total variation of the sub-function's measure.
double kernel_chain(Evaluator& ev, const Eigen::VectorXd& x,
                    const ChainAtom& atom, const ActivationSpec& act,
                    const WeightingSpec& wgt);

double eval_chain(const ChainFunction& f, const Eigen::VectorXd& x);
Eigen::VectorXd eval_chain_batch(const ChainFunction& f,
                                 const Eigen::MatrixXd& X);

// Feature matrix of a fixed atom list on a sample: values(i, j) is the
// layer-`layer` kernel of atoms[j] at X.row(i). Sub-function evaluations
// are memoized per row across columns.
struct GramMatrix {
  Eigen::MatrixXd values;
  int layer = 1;
  std::vector<Atom> atoms;
};

GramMatrix gram_matrix(const Eigen::MatrixXd& X, const std::vector<Atom>& atoms,
                       int layer, const ActivationSpec& act,
                       const WeightingSpec& wgt, const Registry& registry);

// Norm bound used throughout: the total variation of the representing
// measure. With the coefficient convention above this is exactly
// sum_j |c_j|.
double norm_upper_bound(const ChainFunction& f);
double norm_upper_bound(const ChainFunctionData& fn);

}  // namespace crkbs
