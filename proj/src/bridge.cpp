#include "crkbs/bridge.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "crkbs/errors.hpp"

namespace crkbs {

namespace {

std::vector<Atom> dedup_atoms(const std::vector<const AtomicMeasure*>& measures) {
  std::vector<Atom> out;
  std::unordered_set<std::string> seen;
  for (const auto* m : measures) {
    for (const auto& a : m->atoms) {
      if (seen.insert(atom_key(a)).second) {
        out.push_back(a);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<ChainFunction> embed_network(
    const DeepNetwork& net, const std::vector<WeightingSpec>& weightings,
    RegistryPtr registry) {
  net.validate();
  const int L = net.depth();
  if (weightings.size() != static_cast<std::size_t>(L)) {
    throw ContractError("need one weighting spec per hidden layer");
  }
  if (!registry) {
    registry = std::make_shared<Registry>();
  }
  const auto& acts = net.activations;

  // Layer-1 atoms: one per first-layer unit.
  std::vector<Atom> atoms;
  std::vector<double> betas;
  for (Eigen::Index k = 0; k < net.hidden_W[0].rows(); ++k) {
    Layer1Atom a{net.hidden_W[0].row(k).transpose(), net.biases[0][k]};
    double beta = eval_weighting(weightings[0], a);
    atoms.emplace_back(std::move(a));
    betas.push_back(beta);
  }

  // Climb the hidden layers: row j of W^l defines a depth-l function whose
  // measure divides each weight by the weighting of the unit it references,
  // so that evaluation through the weighted kernels reproduces W^l h^l.
  for (int l = 1; l < L; ++l) {
    const Eigen::MatrixXd& W = net.hidden_W[static_cast<std::size_t>(l)];
    const Eigen::VectorXd& b = net.biases[static_cast<std::size_t>(l)];
    std::vector<ActivationSpec> sub_acts(acts.begin(), acts.begin() + l);
    std::vector<WeightingSpec> sub_wgts(weightings.begin(),
                                        weightings.begin() + l);
    std::vector<Atom> next_atoms;
    std::vector<double> next_betas;
    for (Eigen::Index j = 0; j < W.rows(); ++j) {
      AtomicMeasure m;
      m.atoms = atoms;
      m.coeffs.resize(atoms.size());
      for (std::size_t k = 0; k < atoms.size(); ++k) {
        m.coeffs[k] = W(j, static_cast<Eigen::Index>(k)) / betas[k];
      }
      FunctionId id = registry->intern(l, std::move(m), sub_acts, sub_wgts);
      ChainAtom ca{l + 1, id, b[j]};
      double beta =
          eval_weighting(weightings[static_cast<std::size_t>(l)], ca,
                         registry->at(id).total_variation);
      next_atoms.emplace_back(std::move(ca));
      next_betas.push_back(beta);
    }
    atoms = std::move(next_atoms);
    betas = std::move(next_betas);
  }

  std::vector<ChainFunction> roots;
  for (Eigen::Index i = 0; i < net.final_W.rows(); ++i) {
    AtomicMeasure m;
    m.atoms = atoms;
    m.coeffs.resize(atoms.size());
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      m.coeffs[k] = net.final_W(i, static_cast<Eigen::Index>(k)) / betas[k];
    }
    FunctionId id = registry->intern(L, std::move(m), acts, weightings);
    roots.push_back(ChainFunction{registry, id});
  }
  return roots;
}

std::vector<FunctionId> reachable_children(const Registry& registry,
                                           std::span<const FunctionId> parents) {
  std::vector<FunctionId> out;
  std::unordered_set<FunctionId> seen;
  for (const auto& id : parents) {
    for (const auto& a : registry.at(id).measure.atoms) {
      if (const auto* ch = std::get_if<ChainAtom>(&a)) {
        if (seen.insert(ch->f).second) {
          out.push_back(ch->f);
        }
      }
    }
  }
  return out;
}

namespace {

// State of the layer most recently rebuilt: its basis, the full selected
// columns on the sample, and the weighting value per selected unit. A layer
// whose feature matrix was numerically zero keeps rank 0 here while the
// network carries one zero unit; re-expression coefficients are then padded
// with a zero so the unit is never referenced.
struct LayerState {
  BasisSelection sel;
  Eigen::MatrixXd columns;   // N x rank
  std::vector<double> betas; // per selected unit
  int width = 1;             // max(rank, 1)
};

Eigen::VectorXd reexpress_or_throw(const LayerState& state,
                                   const Eigen::VectorXd& values, int layer,
                                   double tol) {
  double scale = std::max(1.0, values.cwiseAbs().maxCoeff());
  Reexpression re;
  try {
    re = reexpress(state.sel, state.columns, values);
  } catch (const InfeasibleError&) {
    throw ExtractionError(layer, values.cwiseAbs().maxCoeff(),
                          "layer " + std::to_string(layer) +
                              " basis is empty but a function is nonzero on the sample");
  }
  if (re.residual > tol * scale) {
    throw ExtractionError(layer, re.residual,
                          "re-expression at layer " + std::to_string(layer) +
                              " leaves residual " + std::to_string(re.residual));
  }
  if (state.sel.rank() == 0) {
    return Eigen::VectorXd::Zero(1);
  }
  return re.coeffs;
}

Eigen::MatrixXd pick_columns(const Eigen::MatrixXd& G,
                             const std::vector<int>& cols) {
  Eigen::MatrixXd out(G.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    out.col(static_cast<Eigen::Index>(k)) = G.col(cols[k]);
  }
  return out;
}

}  // namespace

ExtractionResult extract_network(std::span<const ChainFunction> roots,
                                 const Eigen::MatrixXd& X,
                                 double pivot_threshold,
                                 double reexpression_tol) {
  if (roots.empty()) {
    throw ContractError("need at least one root function");
  }
  if (X.rows() == 0 || X.cols() == 0) {
    throw ContractError("extraction needs a nonempty sample");
  }
  const RegistryPtr registry = roots[0].registry;
  const ChainFunctionData& first = roots[0].data();
  const int L = first.depth;
  for (const auto& r : roots) {
    if (r.registry != registry) {
      throw ContractError("root functions must share one registry");
    }
    const ChainFunctionData& d = r.data();
    if (d.depth != L || d.activations != first.activations ||
        d.weightings != first.weightings) {
      throw ContractError("root functions must share depth and layer specs");
    }
  }
  const auto& acts = first.activations;
  const auto& wgts = first.weightings;

  // Reachable function ids per depth, first-seen order.
  std::vector<std::vector<FunctionId>> reach(static_cast<std::size_t>(L) + 1);
  {
    std::unordered_set<FunctionId> seen;
    for (const auto& r : roots) {
      if (seen.insert(r.id).second) {
        reach[static_cast<std::size_t>(L)].push_back(r.id);
      }
    }
  }
  for (int d = L; d >= 2; --d) {
    reach[static_cast<std::size_t>(d) - 1] = reachable_children(
        *registry, reach[static_cast<std::size_t>(d)]);
  }

  auto measures_of = [&](const std::vector<FunctionId>& ids) {
    std::vector<const AtomicMeasure*> ms;
    for (const auto& id : ids) {
      ms.push_back(&registry->at(id).measure);
    }
    return ms;
  };

  DeepNetwork net;
  net.activations = acts;
  ExtractionResult result;

  // Layer 1.
  std::vector<Atom> candidates =
      dedup_atoms(measures_of(reach[1]));
  GramMatrix G = gram_matrix(X, candidates, 1, acts[0], wgts[0], *registry);
  LayerState state;
  state.sel = select_basis(G.values, pivot_threshold);
  state.columns = pick_columns(G.values, state.sel.col_indices);
  if (state.sel.rank() > 0) {
    state.width = state.sel.rank();
    Eigen::MatrixXd W0(state.width, X.cols());
    Eigen::VectorXd b1(state.width);
    for (int k = 0; k < state.width; ++k) {
      const auto& a = std::get<Layer1Atom>(candidates[static_cast<std::size_t>(
          state.sel.col_indices[static_cast<std::size_t>(k)])]);
      W0.row(k) = a.v.transpose();
      b1[k] = a.b;
      state.betas.push_back(eval_weighting(wgts[0], a));
    }
    net.hidden_W.push_back(std::move(W0));
    net.biases.push_back(std::move(b1));
  } else {
    net.hidden_W.push_back(Eigen::MatrixXd::Zero(1, X.cols()));
    net.biases.push_back(Eigen::VectorXd::Zero(1));
  }
  result.selections.push_back(state.sel);

  // Layers 2..L: re-express the previous depth's functions, then select
  // this layer's units among the reachable atoms.
  for (int l = 2; l <= L; ++l) {
    std::unordered_map<FunctionId, Eigen::VectorXd> coef;
    for (const auto& id : reach[static_cast<std::size_t>(l) - 1]) {
      Eigen::VectorXd vals =
          eval_chain_batch(ChainFunction{registry, id}, X);
      coef[id] = reexpress_or_throw(state, vals, l - 1, reexpression_tol);
    }

    candidates = dedup_atoms(measures_of(reach[static_cast<std::size_t>(l)]));
    G = gram_matrix(X, candidates, l, acts[static_cast<std::size_t>(l) - 1],
                    wgts[static_cast<std::size_t>(l) - 1], *registry);
    LayerState next;
    next.sel = select_basis(G.values, pivot_threshold);
    next.columns = pick_columns(G.values, next.sel.col_indices);
    if (next.sel.rank() > 0) {
      next.width = next.sel.rank();
      Eigen::MatrixXd W(next.width, state.width);
      Eigen::VectorXd b(next.width);
      for (int k = 0; k < next.width; ++k) {
        const auto& a = std::get<ChainAtom>(candidates[static_cast<std::size_t>(
            next.sel.col_indices[static_cast<std::size_t>(k)])]);
        const Eigen::VectorXd& c = coef.at(a.f);
        for (int m = 0; m < state.width; ++m) {
          double beta = state.sel.rank() > 0
                            ? state.betas[static_cast<std::size_t>(m)]
                            : 1.0;
          W(k, m) = c[m] * beta;
        }
        b[k] = a.b;
        next.betas.push_back(eval_weighting(
            wgts[static_cast<std::size_t>(l) - 1], a,
            registry->at(a.f).total_variation));
      }
      net.hidden_W.push_back(std::move(W));
      net.biases.push_back(std::move(b));
    } else {
      net.hidden_W.push_back(Eigen::MatrixXd::Zero(1, state.width));
      net.biases.push_back(Eigen::VectorXd::Zero(1));
    }
    result.selections.push_back(next.sel);
    state = std::move(next);
  }

  // Final layer: re-express each root in the depth-L basis. The solved
  // coefficients are exactly the measure coefficients of the extracted
  // function, so the extracted norm is their absolute sum.
  Eigen::MatrixXd final_W(static_cast<Eigen::Index>(roots.size()), state.width);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    Eigen::VectorXd vals = eval_chain_batch(roots[i], X);
    Eigen::VectorXd c = reexpress_or_throw(state, vals, L, reexpression_tol);
    for (int m = 0; m < state.width; ++m) {
      double beta =
          state.sel.rank() > 0 ? state.betas[static_cast<std::size_t>(m)] : 1.0;
      final_W(static_cast<Eigen::Index>(i), m) = c[m] * beta;
    }
    result.output_norms.push_back(c.lpNorm<1>());
  }
  net.final_W = std::move(final_W);
  net.validate();
  result.network = std::move(net);
  return result;
}

DeepNetwork extract_network(const ChainFunction& root, const Eigen::MatrixXd& X,
                            double pivot_threshold, double reexpression_tol) {
  std::vector<ChainFunction> roots{root};
  return extract_network(std::span<const ChainFunction>(roots), X,
                         pivot_threshold, reexpression_tol)
      .network;
}

}  // namespace crkbs
