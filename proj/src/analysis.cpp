#include "crkbs/analysis.hpp"

#include <cmath>
#include <string>

#include "crkbs/errors.hpp"
#include "crkbs/rng.hpp"

namespace crkbs {

double path_norm(const DeepNetwork& net) {
  net.validate();
  Eigen::VectorXd p =
      net.hidden_W[0].cwiseAbs() * Eigen::VectorXd::Ones(net.hidden_W[0].cols());
  for (std::size_t l = 1; l < net.hidden_W.size(); ++l) {
    p = net.hidden_W[l].cwiseAbs() * p;
  }
  return (net.final_W.cwiseAbs() * p).sum();
}

ChainFunction make_const_one(int depth, int input_dim,
                             const std::vector<ActivationSpec>& activations,
                             const std::vector<WeightingSpec>& weightings,
                             RegistryPtr registry) {
  if (depth < 1 || input_dim < 1) {
    throw ContractError("constant function needs positive depth and input dimension");
  }
  if (activations.size() != static_cast<std::size_t>(depth) ||
      weightings.size() != static_cast<std::size_t>(depth)) {
    throw ContractError("need one activation and weighting per layer");
  }
  if (!registry) {
    throw ContractError("constant function needs a registry");
  }
  // Base: sigma_1(<0, x> + 1) is the constant sigma_1(1), nonzero for every
  // supported activation; dividing by it and the weighting normalizes to 1.
  Layer1Atom base{Eigen::VectorXd::Zero(input_dim), 1.0};
  double denom = eval_activation(activations[0], 1.0) *
                 eval_weighting(weightings[0], base);
  AtomicMeasure m;
  m.atoms.push_back(base);
  m.coeffs.push_back(1.0 / denom);
  FunctionId id = registry->intern(
      1, std::move(m), {activations[0]}, {weightings[0]});

  // Climb with zero biases: sigma_l(1 + 0) is again nonzero.
  for (int l = 2; l <= depth; ++l) {
    ChainAtom atom{l, id, 0.0};
    double beta = eval_weighting(weightings[static_cast<std::size_t>(l) - 1],
                                 atom, registry->at(id).total_variation);
    double val = eval_activation(activations[static_cast<std::size_t>(l) - 1], 1.0);
    AtomicMeasure next;
    next.atoms.push_back(atom);
    next.coeffs.push_back(1.0 / (val * beta));
    id = registry->intern(
        l, std::move(next),
        std::vector<ActivationSpec>(activations.begin(),
                                    activations.begin() + l),
        std::vector<WeightingSpec>(weightings.begin(),
                                   weightings.begin() + l));
  }
  return ChainFunction{std::move(registry), std::move(id)};
}

namespace {

// Spot check that const_fn evaluates to 1: the origin, the first few basis
// directions, and a handful of seeded draws.
void verify_const_one(const ChainFunction& const_fn, int input_dim) {
  Evaluator ev(*const_fn.registry);
  std::vector<Eigen::VectorXd> probes;
  probes.push_back(Eigen::VectorXd::Zero(input_dim));
  for (int i = 0; i < std::min(input_dim, 4); ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(input_dim);
    e[i] = 1.0;
    probes.push_back(e);
    probes.push_back(-e);
  }
  RandomEngine engine(0x636f6e7374ULL);
  for (int t = 0; t < 8; ++t) {
    Eigen::VectorXd x(input_dim);
    for (int i = 0; i < input_dim; ++i) {
      x[i] = engine.normal();
    }
    probes.push_back(std::move(x));
  }
  for (const auto& x : probes) {
    double val = ev.eval(const_fn.id, x);
    if (std::abs(val - 1.0) > 1e-12) {
      throw ContractError(
          "const function deviates from 1 by " + std::to_string(val - 1.0));
    }
  }
}

}  // namespace

int chain_input_dim(const Registry& registry, const FunctionId& root) {
  FunctionId id = root;
  while (true) {
    const ChainFunctionData& fn = registry.at(id);
    if (fn.measure.size() == 0) {
      return -1;
    }
    if (const auto* l1 = std::get_if<Layer1Atom>(&fn.measure.atoms[0])) {
      return static_cast<int>(l1->v.size());
    }
    id = std::get<ChainAtom>(fn.measure.atoms[0]).f;
  }
}

BiasEliminationResult eliminate_bias(const ChainFunction& f,
                                     const WeightingSpec& output_weighting,
                                     const ChainFunction& const_fn) {
  const ChainFunctionData& fn = f.data();
  if (fn.depth < 2) {
    throw ContractError("bias elimination needs depth at least 2");
  }
  if (f.registry != const_fn.registry) {
    throw ContractError("function and constant must share one registry");
  }
  const ChainFunctionData& cfn = const_fn.data();
  if (cfn.depth != fn.depth - 1) {
    throw ContractError("constant function must have depth " +
                        std::to_string(fn.depth - 1));
  }
  std::vector<ActivationSpec> sub_acts(fn.activations.begin(),
                                       fn.activations.end() - 1);
  std::vector<WeightingSpec> sub_wgts(fn.weightings.begin(),
                                      fn.weightings.end() - 1);
  if (cfn.activations != sub_acts || cfn.weightings != sub_wgts) {
    throw ContractError("constant function uses different layer specs");
  }
  int dim = chain_input_dim(*f.registry, const_fn.id);
  if (dim < 0) {
    // The constant may be built purely from biases; probe in the input
    // dimension of f instead (or 1 if that is also bias-only).
    dim = chain_input_dim(*f.registry, f.id);
  }
  verify_const_one(const_fn, dim > 0 ? dim : 1);

  const WeightingSpec& beta_in = fn.weightings.back();
  const Registry& registry = *f.registry;

  BiasEliminationResult result;
  result.tv_in = fn.total_variation;

  AtomicMeasure out;
  for (std::size_t j = 0; j < fn.measure.size(); ++j) {
    const auto& ch = std::get<ChainAtom>(fn.measure.atoms[j]);
    const ChainFunctionData& g = registry.at(ch.f);

    // Shifted sub-function g + b * const_one.
    FunctionId shifted_id;
    if (ch.b == 0.0) {
      shifted_id = ch.f;
    } else {
      AtomicMeasure m = g.measure;
      for (std::size_t k = 0; k < cfn.measure.size(); ++k) {
        m.atoms.push_back(cfn.measure.atoms[k]);
        m.coeffs.push_back(ch.b * cfn.measure.coeffs[k]);
      }
      shifted_id = f.registry->intern(fn.depth - 1, std::move(m), sub_acts,
                                      sub_wgts);
    }
    ChainAtom shifted{fn.depth, shifted_id, 0.0};
    double shifted_tv = registry.at(shifted_id).total_variation;

    // The output weighting must coincide with the input weighting on
    // bias-free atoms, otherwise the two spaces disagree where the
    // rewritten measure lives. Equal kinds agree by definition; distinct
    // kinds are probed on this atom.
    if (beta_in.kind != output_weighting.kind) {
      ChainAtom probe{fn.depth, ch.f, 0.0};
      double beta_in_on_zero =
          eval_weighting(beta_in, probe, g.total_variation);
      double beta_out_on_zero =
          eval_weighting(output_weighting, probe, g.total_variation);
      if (beta_in_on_zero != beta_out_on_zero) {
        throw ContractError(
            "output weighting disagrees with the input weighting on bias-free atoms");
      }
    }

    double beta_orig = eval_weighting(beta_in, ch, g.total_variation);
    double beta_new = eval_weighting(output_weighting, shifted, shifted_tv);
    double ratio = beta_orig / beta_new;
    result.sup_ratio = std::max(result.sup_ratio, std::abs(ratio));

    out.atoms.push_back(shifted);
    out.coeffs.push_back(fn.measure.coeffs[j] * ratio);
  }

  std::vector<WeightingSpec> out_wgts = sub_wgts;
  out_wgts.push_back(output_weighting);
  FunctionId out_id =
      f.registry->intern(fn.depth, std::move(out), fn.activations, out_wgts);
  result.function = ChainFunction{f.registry, out_id};
  result.tv_out = registry.at(out_id).total_variation;
  return result;
}

namespace {

void fill_noise(Eigen::VectorXd& xi, NoiseKind kind, RandomEngine& engine) {
  for (Eigen::Index i = 0; i < xi.size(); ++i) {
    xi[i] = kind == NoiseKind::rademacher ? engine.sign() : engine.normal();
  }
}

}  // namespace

ComplexityEstimate sampled_complexity(const Eigen::MatrixXd& X,
                                      const std::vector<Atom>& pool, int layer,
                                      const ActivationSpec& act,
                                      const WeightingSpec& wgt,
                                      const Registry& registry, int num_draws,
                                      NoiseKind kind, std::uint64_t seed) {
  if (num_draws < 1) {
    throw ContractError("complexity estimate needs at least one draw");
  }
  if (pool.empty()) {
    throw ContractError("complexity estimate needs a nonempty pool");
  }
  GramMatrix G = gram_matrix(X, pool, layer, act, wgt, registry);
  const double n = static_cast<double>(X.rows());

  double sum = 0.0;
  double sumsq = 0.0;
  Eigen::VectorXd xi(X.rows());
  for (int t = 0; t < num_draws; ++t) {
    RandomEngine engine(derive_seed(seed, static_cast<std::uint64_t>(t)));
    fill_noise(xi, kind, engine);
    double sup = (G.values.transpose() * xi).cwiseAbs().maxCoeff();
    double s = sup / n;
    sum += s;
    sumsq += s * s;
  }
  ComplexityEstimate est;
  est.value = sum / num_draws;
  if (num_draws > 1) {
    double var = (sumsq - sum * sum / num_draws) / (num_draws - 1);
    est.standard_error = std::sqrt(std::max(var, 0.0) / num_draws);
  }
  est.kind = kind;
  est.num_draws = num_draws;
  est.pool_size = static_cast<int>(pool.size());
  est.exhaustive = false;
  est.lower_bound = true;
  return est;
}

ComplexityEstimate exhaustive_rademacher_complexity(
    const Eigen::MatrixXd& X, const std::vector<Atom>& pool, int layer,
    const ActivationSpec& act, const WeightingSpec& wgt,
    const Registry& registry) {
  if (pool.empty()) {
    throw ContractError("complexity estimate needs a nonempty pool");
  }
  const Eigen::Index N = X.rows();
  if (N > 20) {
    throw ContractError("exhaustive enumeration is limited to 20 samples");
  }
  GramMatrix G = gram_matrix(X, pool, layer, act, wgt, registry);
  const std::uint64_t count = 1ULL << N;
  double sum = 0.0;
  Eigen::VectorXd xi(N);
  for (std::uint64_t u = 0; u < count; ++u) {
    for (Eigen::Index i = 0; i < N; ++i) {
      xi[i] = (u >> i) & 1ULL ? -1.0 : 1.0;
    }
    sum += (G.values.transpose() * xi).cwiseAbs().maxCoeff();
  }
  ComplexityEstimate est;
  est.value = sum / (static_cast<double>(count) * static_cast<double>(N));
  est.standard_error = 0.0;
  est.kind = NoiseKind::rademacher;
  est.num_draws = static_cast<int>(count);
  est.pool_size = static_cast<int>(pool.size());
  est.exhaustive = true;
  est.lower_bound = true;
  return est;
}

}  // namespace crkbs
