#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "crkbs/basis.hpp"
#include "crkbs/kernel.hpp"
#include "crkbs/network.hpp"
#include "crkbs/registry.hpp"

namespace crkbs {

// Embeds a network into chain-function form, one root per output dimension,
// all sharing `registry`. Layer l of the network becomes a family of
// depth-l functions: unit k of layer l + 1 contributes the atom
// (f_k^l, b_k^{l+1}) and row j of W^l contributes the coefficients
// W^l_{jk} / beta_{l}(atom_k). Exact identity: eval_chain of root i equals
// output i of net.forward at every point.
std::vector<ChainFunction> embed_network(const DeepNetwork& net,
                                         const std::vector<WeightingSpec>& weightings,
                                         RegistryPtr registry);

// Rebuilds a network from chain functions using their values on a finite
// sample. Per layer, the atoms reachable in the functions' graphs are the
// candidate units; complete pivoting on the layer's feature matrix picks at
// most N of them, and every reachable function is re-expressed in that
// basis. The result matches eval_chain on the rows of X (not elsewhere) and
// its hidden widths are at most N.
//
// All roots must share one registry, one depth, and one spec list. Layers
// whose feature matrix is numerically zero get a single zero unit so the
// network stays well formed. Throws ExtractionError when a re-expression
// residual exceeds reexpression_tol * max(1, value scale).
struct ExtractionResult {
  DeepNetwork network;
  std::vector<BasisSelection> selections;  // one per layer, 1..L
  // Per output row: sum_k |final_W(i, k)| / beta_L(unit k), the total
  // variation of the extracted function's own representing measure.
  std::vector<double> output_norms;
};

ExtractionResult extract_network(std::span<const ChainFunction> roots,
                                 const Eigen::MatrixXd& X,
                                 double pivot_threshold = 1e-10,
                                 double reexpression_tol = 1e-6);

DeepNetwork extract_network(const ChainFunction& root, const Eigen::MatrixXd& X,
                            double pivot_threshold = 1e-10,
                            double reexpression_tol = 1e-6);

// Depth-l functions referenced (through atoms) by functions of depth l + 1,
// in first-seen traversal order. Exposed for candidate enumeration.
std::vector<FunctionId> reachable_children(const Registry& registry,
                                           std::span<const FunctionId> parents);

}  // namespace crkbs
