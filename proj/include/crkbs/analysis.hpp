#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "crkbs/kernel.hpp"
#include "crkbs/network.hpp"
#include "crkbs/registry.hpp"

namespace crkbs {

// Sum over all input-to-output paths of the product of absolute weights
// (biases excluded), computed by the linear-time recursion
// p = |final_W| |W^{L-1}| ... |W^0| 1.
double path_norm(const DeepNetwork& net);

// Depth-`depth` chain function that evaluates to 1 everywhere, built from
// the zero-direction atom (v = 0, b = 1) and propagated upward with zero
// biases. Used to absorb top-layer biases into the measure.
ChainFunction make_const_one(int depth, int input_dim,
                             const std::vector<ActivationSpec>& activations,
                             const std::vector<WeightingSpec>& weightings,
                             RegistryPtr registry);

// Rewrites a depth-L function (L >= 2) so every top-layer atom has bias
// zero: atom (g, b) with coefficient c becomes (g + b * const_one, 0) with
// coefficient c * beta(g, b) / beta_out(g + b * const_one, 0). The output
// weighting beta_out must agree with the input weighting on bias-free atoms;
// this is checked atom by atom. `const_fn` must be a depth L-1 function
// from the same registry realizing the constant 1 (verified on probe points).
struct BiasEliminationResult {
  ChainFunction function;
  double tv_in = 0.0;
  double tv_out = 0.0;
  // max over atoms of |beta(g, b) / beta_out(g + b c, 0)|; the output total
  // variation is bounded by sup_ratio * tv_in.
  double sup_ratio = 0.0;
};

BiasEliminationResult eliminate_bias(const ChainFunction& f,
                                     const WeightingSpec& output_weighting,
                                     const ChainFunction& const_fn);

// Input dimension read off the first layer-1 atom reachable from `root`,
// or -1 when the function is built purely from biases (no layer-1 atoms).
int chain_input_dim(const Registry& registry, const FunctionId& root);

// Monte Carlo estimate of the empirical complexity of the unit-norm kernel
// dictionary {phi(., w) : w in pool} on the sample:
//   (1/M) sum_t max_j |sum_i xi_i phi(x_i, w_j)| / N
// with xi either Rademacher signs or standard normals. Draw t uses the
// engine seeded derive_seed(seed, t), so enlarging the pool keeps the same
// noise. The estimate is a lower bound on the dictionary's supremum-based
// complexity since the max runs over a finite pool.
enum class NoiseKind { rademacher, gaussian };

struct ComplexityEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  NoiseKind kind = NoiseKind::rademacher;
  int num_draws = 0;
  int pool_size = 0;
  bool exhaustive = false;
  bool lower_bound = true;  // finite pool: true unless the pool is exhaustive
};

ComplexityEstimate sampled_complexity(const Eigen::MatrixXd& X,
                                      const std::vector<Atom>& pool, int layer,
                                      const ActivationSpec& act,
                                      const WeightingSpec& wgt,
                                      const Registry& registry, int num_draws,
                                      NoiseKind kind, std::uint64_t seed);

// Exact Rademacher average over all 2^N sign vectors (N <= 20).
ComplexityEstimate exhaustive_rademacher_complexity(
    const Eigen::MatrixXd& X, const std::vector<Atom>& pool, int layer,
    const ActivationSpec& act, const WeightingSpec& wgt,
    const Registry& registry);

}  // namespace crkbs
