#pragma once

#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "crkbs/types.hpp"

namespace crkbs {

// Immutable record of one interned chain function.
//
// A chain function of depth L is a finite atomic measure over layer-L atoms
// together with the activation and weighting used at each layer:
//   depth 1:  x -> sum_j c_j * sigma_1(<v_j, x> + b_j) * beta_1(v_j, b_j)
//   depth L:  x -> sum_j c_j * sigma_L(f_j(x) + b_j) * beta_L(f_j, b_j)
// where each f_j is a previously interned function of depth L - 1.
// activations[l-1] / weightings[l-1] are the specs for layer l.
struct ChainFunctionData {
  int depth = 1;
  AtomicMeasure measure;  // canonical form
  std::vector<ActivationSpec> activations;
  std::vector<WeightingSpec> weightings;
  double total_variation = 0.0;
  FunctionId id;
};

// Content-addressed store of chain functions. Interning canonicalizes the
// measure, validates the structure against already-interned children, and
// keys the record by the SHA-256 of its canonical serialization, so
// structurally identical functions share one id and one record. Entries are
// immutable; the registry only grows.
class Registry {
 public:
  Registry() = default;
  Registry(const Registry&) = delete;
  Registry& operator=(const Registry&) = delete;

  // Interns a function and returns its id. Children referenced by chain
  // atoms must already be interned here with depth exactly depth - 1.
  FunctionId intern(int depth, AtomicMeasure measure,
                    std::vector<ActivationSpec> activations,
                    std::vector<WeightingSpec> weightings);

  bool contains(const FunctionId& id) const;

  // Throws RegistryError for unknown ids. The reference stays valid for
  // the registry's lifetime.
  const ChainFunctionData& at(const FunctionId& id) const;

  std::size_t size() const;

 private:
  mutable std::shared_mutex mutex_;
  std::unordered_map<FunctionId, std::unique_ptr<const ChainFunctionData>>
      functions_;
};

using RegistryPtr = std::shared_ptr<Registry>;

// Handle pairing a function id with the registry that owns it.
struct ChainFunction {
  RegistryPtr registry;
  FunctionId id;

  const ChainFunctionData& data() const;
  int depth() const { return data().depth; }
};

}  // namespace crkbs
