#include "crkbs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crkbs/basis.hpp"
#include "crkbs/bridge.hpp"
#include "crkbs/errors.hpp"
#include "crkbs/kernel.hpp"

namespace crkbs {

void FitConfig::validate() const {
  if (depth < 1) {
    throw ContractError("fit depth must be at least 1");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ContractError("lambda must be finite and positive");
  }
  if (pool_sizes.size() != static_cast<std::size_t>(depth)) {
    throw ContractError("need one pool size per layer");
  }
  for (std::size_t l = 0; l < pool_sizes.size(); ++l) {
    if (pool_sizes[l] < 0) {
      throw ContractError("pool sizes must be nonnegative");
    }
    if (l > 0 && pool_sizes[l] == 0) {
      throw ContractError("layers past the first need a positive pool size");
    }
  }
  if (activations.size() != static_cast<std::size_t>(depth) ||
      weightings.size() != static_cast<std::size_t>(depth)) {
    throw ContractError("need one activation and weighting per layer");
  }
  if (!(objective_tol >= 0.0) || max_sweeps < 1) {
    throw ContractError("objective tolerance must be nonnegative and sweep limit positive");
  }
  if (!(pivot_threshold >= 0.0) || !std::isfinite(pivot_threshold)) {
    throw ContractError("pivot threshold must be finite and nonnegative");
  }
}

namespace {

double lasso_objective(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                       double lambda, const Eigen::VectorXd& c) {
  double fit = 0.5 * (G * c - y).squaredNorm();
  return fit + lambda * c.lpNorm<1>();
}

}  // namespace

SolveResult solve_last_layer(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                             double lambda, double objective_tol,
                             int max_sweeps, const Eigen::VectorXd* init) {
  if (G.rows() != y.size()) {
    throw ContractError("feature matrix and targets disagree on sample count");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ContractError("lambda must be finite and nonnegative");
  }
  const Eigen::Index m = G.cols();
  SolveResult result;
  if (init != nullptr) {
    if (init->size() != m) {
      throw ContractError("initial coefficients disagree with column count");
    }
    result.coeffs = *init;
  } else {
    result.coeffs = Eigen::VectorXd::Zero(m);
  }
  Eigen::VectorXd col_sq(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    col_sq[j] = G.col(j).squaredNorm();
  }

  double obj = lasso_objective(G, y, lambda, result.coeffs);
  result.objective_trace.push_back(obj);

  // Residual r = y - G c, refreshed every sweep to cap drift from updates.
  Eigen::VectorXd r = y - G * result.coeffs;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (col_sq[j] == 0.0) {
        continue;  // zero column: any finite value adds only penalty
      }
      double cj = result.coeffs[j];
      double rho = G.col(j).dot(r) + col_sq[j] * cj;
      double next;
      if (rho > lambda) {
        next = (rho - lambda) / col_sq[j];
      } else if (rho < -lambda) {
        next = (rho + lambda) / col_sq[j];
      } else {
        next = 0.0;
      }
      if (next != cj) {
        r -= (next - cj) * G.col(j);
        result.coeffs[j] = next;
      }
    }
    r = y - G * result.coeffs;
    double next_obj = lasso_objective(G, y, lambda, result.coeffs);
    result.objective_trace.push_back(next_obj);
    double decrease = obj - next_obj;
    if (decrease <= objective_tol * std::max(obj, 1e-300)) {
      obj = next_obj;
      result.converged = true;
      break;
    }
    obj = next_obj;
  }
  return result;
}

std::vector<Atom> layer1_candidates(int pool_size, const Eigen::MatrixXd& X,
                                    RandomEngine& engine) {
  std::vector<Atom> pool;
  const Eigen::Index d = X.cols();
  for (int t = 0; t < pool_size; ++t) {
    Layer1Atom a;
    a.v.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      a.v[i] = engine.normal();
    }
    a.b = engine.uniform(-1.0, 1.0);
    pool.emplace_back(std::move(a));
  }
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double nrm = X.row(i).norm();
    if (nrm == 0.0) {
      continue;
    }
    Eigen::VectorXd unit = X.row(i).transpose() / nrm;
    pool.emplace_back(Layer1Atom{unit, 0.0});
    pool.emplace_back(Layer1Atom{-unit, 0.0});
  }
  return pool;
}

std::vector<Atom> chain_candidates(int pool_size, int layer,
                                   const std::vector<Atom>& basis_atoms,
                                   const std::vector<ActivationSpec>& activations,
                                   const std::vector<WeightingSpec>& weightings,
                                   Registry& registry, RandomEngine& engine) {
  if (layer < 2) {
    throw ContractError("chain candidates start at layer 2");
  }
  if (basis_atoms.empty()) {
    throw ContractError("chain candidates need a nonempty basis");
  }
  std::vector<ActivationSpec> sub_acts(activations.begin(),
                                       activations.begin() + (layer - 1));
  std::vector<WeightingSpec> sub_wgts(weightings.begin(),
                                      weightings.begin() + (layer - 1));
  std::vector<Atom> pool;
  for (int t = 0; t < pool_size; ++t) {
    AtomicMeasure m;
    m.atoms = basis_atoms;
    m.coeffs.resize(basis_atoms.size());
    for (std::size_t k = 0; k < basis_atoms.size(); ++k) {
      m.coeffs[k] = engine.normal();
    }
    FunctionId id = registry.intern(layer - 1, std::move(m), sub_acts, sub_wgts);
    double b = engine.uniform(-1.0, 1.0);
    pool.emplace_back(ChainAtom{layer, id, b});
  }
  return pool;
}

FitResult fit_erm(const Dataset& data, const FitConfig& config) {
  config.validate();
  if (!data.Y.has_value()) {
    throw ContractError("fitting requires targets");
  }
  if (data.Y->cols() != 1) {
    throw ContractError("fitting supports scalar targets only");
  }
  const Eigen::VectorXd y = data.Y->col(0);
  const int L = config.depth;

  auto registry = std::make_shared<Registry>();
  RandomEngine engine(config.seed);

  std::vector<Atom> basis;
  GramMatrix G;
  BasisSelection sel;
  for (int l = 1; l <= L; ++l) {
    std::vector<Atom> pool;
    if (l == 1) {
      pool = layer1_candidates(config.pool_sizes[0], data.X, engine);
    } else {
      pool = chain_candidates(config.pool_sizes[static_cast<std::size_t>(l) - 1],
                              l, basis, config.activations, config.weightings,
                              *registry, engine);
    }
    if (pool.empty()) {
      throw FitError(l, "candidate pool at layer " + std::to_string(l) +
                            " is empty");
    }
    G = gram_matrix(data.X, pool, l,
                    config.activations[static_cast<std::size_t>(l) - 1],
                    config.weightings[static_cast<std::size_t>(l) - 1],
                    *registry);
    sel = select_basis(G.values, config.pivot_threshold);
    if (sel.rank() == 0) {
      throw FitError(l, "candidate pool at layer " + std::to_string(l) +
                            " is dead: every feature column vanishes on the data");
    }
    std::vector<Atom> selected;
    selected.reserve(static_cast<std::size_t>(sel.rank()));
    for (int idx : sel.col_indices) {
      selected.push_back(pool[static_cast<std::size_t>(idx)]);
    }
    basis = std::move(selected);
  }

  Eigen::MatrixXd Gsel(data.X.rows(), sel.rank());
  for (int k = 0; k < sel.rank(); ++k) {
    Gsel.col(k) = G.values.col(sel.col_indices[static_cast<std::size_t>(k)]);
  }

  SolveResult solve = solve_last_layer(Gsel, y, config.lambda,
                                       config.objective_tol, config.max_sweeps);

  // Package the surviving atoms as the fitted measure. Coordinate descent
  // lands exact zeros, so pruning is an equality test.
  AtomicMeasure measure;
  for (int k = 0; k < sel.rank(); ++k) {
    if (solve.coeffs[k] != 0.0) {
      measure.atoms.push_back(basis[static_cast<std::size_t>(k)]);
      measure.coeffs.push_back(solve.coeffs[k]);
    }
  }
  FunctionId root_id =
      registry->intern(L, measure, config.activations, config.weightings);

  FitResult result{.function = ChainFunction{registry, root_id},
                   .network = {},
                   .objective_trace = std::move(solve.objective_trace),
                   .converged = solve.converged,
                   .support_size = static_cast<int>(measure.size()),
                   .norm = registry->at(root_id).total_variation,
                   .train_residual = (Gsel * solve.coeffs - y).norm(),
                   .widths = {},
                   .seed = config.seed,
                   .last_layer_gram = Gsel};
  result.network = extract_network(result.function, data.X,
                                   config.pivot_threshold);
  result.widths = result.network.widths();
  return result;
}

}  // namespace crkbs
