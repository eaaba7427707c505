#include "crkbs/kernel.hpp"

#include <cmath>
#include <string>

#include "crkbs/errors.hpp"

namespace crkbs {

double kernel_layer1(const Eigen::VectorXd& x, const Layer1Atom& atom,
                     const ActivationSpec& act, const WeightingSpec& wgt) {
  if (x.size() != atom.v.size()) {
    throw ContractError("input has dimension " + std::to_string(x.size()) +
                        ", atom expects " + std::to_string(atom.v.size()));
  }
  if (!x.allFinite()) {
    throw DomainError("evaluation point is not finite");
  }
  double beta = eval_weighting(wgt, atom);
  return eval_activation(act, atom.v.dot(x) + atom.b) * beta;
}

double Evaluator::eval(const FunctionId& id, const Eigen::VectorXd& x) {
  return eval(registry_->at(id), x);
}

double Evaluator::eval(const ChainFunctionData& fn, const Eigen::VectorXd& x) {
  if (!has_x_ || current_x_.size() != x.size() ||
      !(current_x_.array() == x.array()).all()) {
    cache_.clear();
    current_x_ = x;
    has_x_ = true;
  }
  if (auto it = cache_.find(fn.id); it != cache_.end()) {
    return it->second;
  }
  const ActivationSpec& act = fn.activations.back();
  const WeightingSpec& wgt = fn.weightings.back();
  double acc = 0.0;
  for (std::size_t j = 0; j < fn.measure.size(); ++j) {
    double phi;
    if (const auto* l1 = std::get_if<Layer1Atom>(&fn.measure.atoms[j])) {
      phi = kernel_layer1(x, *l1, act, wgt);
    } else {
      const auto& ch = std::get<ChainAtom>(fn.measure.atoms[j]);
      const ChainFunctionData& sub = registry_->at(ch.f);
      double fx = eval(sub, x);
      double beta = eval_weighting(wgt, ch, sub.total_variation);
      phi = eval_activation(act, fx + ch.b) * beta;
    }
    acc += fn.measure.coeffs[j] * phi;
  }
  cache_.emplace(fn.id, acc);
  return acc;
}

double kernel_chain(Evaluator& ev, const Eigen::VectorXd& x,
                    const ChainAtom& atom, const ActivationSpec& act,
                    const WeightingSpec& wgt) {
  const ChainFunctionData& sub = ev.registry().at(atom.f);
  double beta = eval_weighting(wgt, atom, sub.total_variation);
  return eval_activation(act, ev.eval(sub, x) + atom.b) * beta;
}

double eval_chain(const ChainFunction& f, const Eigen::VectorXd& x) {
  Evaluator ev(*f.registry);
  return ev.eval(f.id, x);
}

Eigen::VectorXd eval_chain_batch(const ChainFunction& f,
                                 const Eigen::MatrixXd& X) {
  Evaluator ev(*f.registry);
  const ChainFunctionData& fn = f.data();
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out[i] = ev.eval(fn, X.row(i).transpose());
  }
  return out;
}

GramMatrix gram_matrix(const Eigen::MatrixXd& X, const std::vector<Atom>& atoms,
                       int layer, const ActivationSpec& act,
                       const WeightingSpec& wgt, const Registry& registry) {
  if (layer < 1) {
    throw ContractError("layer index must be at least 1");
  }
  for (const auto& a : atoms) {
    if (layer == 1) {
      if (!std::holds_alternative<Layer1Atom>(a)) {
        throw ContractError("layer-1 feature matrix needs first-layer atoms");
      }
    } else {
      const auto* ch = std::get_if<ChainAtom>(&a);
      if (ch == nullptr || ch->layer != layer) {
        throw ContractError("feature matrix atoms must live at layer " +
                            std::to_string(layer));
      }
    }
  }
  GramMatrix G;
  G.layer = layer;
  G.atoms = atoms;
  G.values.resize(X.rows(), static_cast<Eigen::Index>(atoms.size()));
  Evaluator ev(registry);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::VectorXd x = X.row(i).transpose();
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      double phi;
      if (const auto* l1 = std::get_if<Layer1Atom>(&atoms[j])) {
        phi = kernel_layer1(x, *l1, act, wgt);
      } else {
        const auto& ch = std::get<ChainAtom>(atoms[j]);
        const ChainFunctionData& sub = registry.at(ch.f);
        double beta = eval_weighting(wgt, ch, sub.total_variation);
        phi = eval_activation(act, ev.eval(sub, x) + ch.b) * beta;
      }
      G.values(i, static_cast<Eigen::Index>(j)) = phi;
    }
  }
  return G;
}

double norm_upper_bound(const ChainFunctionData& fn) {
  return fn.total_variation;
}

double norm_upper_bound(const ChainFunction& f) {
  return norm_upper_bound(f.data());
}

}  // namespace crkbs
