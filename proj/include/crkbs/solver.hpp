#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "crkbs/dataset.hpp"
#include "crkbs/network.hpp"
#include "crkbs/registry.hpp"
#include "crkbs/rng.hpp"

namespace crkbs {

struct FitConfig {
  int depth = 1;
  double lambda = 1.0;
  // Candidate pool sizes, one per layer. Layer 1 additionally receives the
  // 2N data-driven atoms (+-x_i / |x_i|_2, 0) for every nonzero sample row.
  std::vector<int> pool_sizes;
  std::vector<ActivationSpec> activations;  // one per layer
  std::vector<WeightingSpec> weightings;    // one per layer
  std::uint64_t seed = 0;
  double pivot_threshold = 1e-10;
  // Coordinate descent stops when the relative objective decrease over a
  // full sweep falls below objective_tol.
  double objective_tol = 1e-10;
  int max_sweeps = 10000;

  void validate() const;
};

// Lasso solve of 0.5 |G c - y|^2 + lambda |c|_1 by cyclic coordinate
// descent with exact per-coordinate soft thresholding. objective_trace[0]
// is the objective at the start (zero coefficients unless `init` is
// given); one entry follows per sweep.
struct SolveResult {
  Eigen::VectorXd coeffs;
  std::vector<double> objective_trace;
  bool converged = false;
};

SolveResult solve_last_layer(const Eigen::MatrixXd& G, const Eigen::VectorXd& y,
                             double lambda, double objective_tol = 1e-10,
                             int max_sweeps = 10000,
                             const Eigen::VectorXd* init = nullptr);

// Layer-1 candidate pool: pool_size atoms with v ~ N(0, I) and
// b ~ U[-1, 1], followed by the data-driven atoms. Draw order is fixed:
// for each random atom, the d coordinates of v then b.
std::vector<Atom> layer1_candidates(int pool_size, const Eigen::MatrixXd& X,
                                    RandomEngine& engine);

// Layer-l (l >= 2) candidate pool: pool_size atoms whose sub-function is a
// random N(0, 1) combination of the selected depth l-1 basis atoms, with
// b ~ U[-1, 1]. Sub-functions are interned into `registry`.
std::vector<Atom> chain_candidates(int pool_size, int layer,
                                   const std::vector<Atom>& basis_atoms,
                                   const std::vector<ActivationSpec>& activations,
                                   const std::vector<WeightingSpec>& weightings,
                                   Registry& registry, RandomEngine& engine);

struct FitResult {
  ChainFunction function;       // fitted chain function (pruned support)
  DeepNetwork network;          // extraction of `function` on the training data
  std::vector<double> objective_trace;
  bool converged = false;
  int support_size = 0;
  double norm = 0.0;            // total variation of the fitted measure
  double train_residual = 0.0;  // |G c - y|_2 at the solution
  std::vector<int> widths;      // network widths including input dim
  std::uint64_t seed = 0;
  Eigen::MatrixXd last_layer_gram;  // N x r, selected depth-L columns
};

// Greedy layerwise fit: sample candidates, keep a numerically independent
// basis per layer via complete pivoting, then solve the convex last-layer
// problem on the final basis. Targets must be scalar (one column).
FitResult fit_erm(const Dataset& data, const FitConfig& config);

}  // namespace crkbs
