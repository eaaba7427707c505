#include "crkbs/registry.hpp"

#include <mutex>
#include <utility>

#include "crkbs/errors.hpp"
#include "crkbs/io.hpp"

namespace crkbs {

FunctionId Registry::intern(int depth, AtomicMeasure measure,
                            std::vector<ActivationSpec> activations,
                            std::vector<WeightingSpec> weightings) {
  if (depth < 1) {
    throw ContractError("chain function depth must be at least 1");
  }
  if (activations.size() != static_cast<std::size_t>(depth) ||
      weightings.size() != static_cast<std::size_t>(depth)) {
    throw ContractError(
        "activation and weighting lists must have one entry per layer");
  }
  AtomicMeasure canon = canonicalize(measure);

  // Structural checks against already-interned children. Requiring children
  // to exist before their parents keeps the reference graph acyclic.
  for (const auto& a : canon.atoms) {
    if (const auto* l1 = std::get_if<Layer1Atom>(&a)) {
      (void)l1;
      if (depth != 1) {
        throw ContractError(
            "first-layer atoms can only appear in depth-1 functions");
      }
    } else {
      const auto& ch = std::get<ChainAtom>(a);
      if (depth == 1) {
        throw ContractError("depth-1 functions must use first-layer atoms");
      }
      if (ch.layer != depth) {
        throw ContractError("atom layer does not match function depth");
      }
      const ChainFunctionData& child = at(ch.f);
      if (child.depth != depth - 1) {
        throw ContractError("chain atom references a function of depth " +
                            std::to_string(child.depth) + ", expected " +
                            std::to_string(depth - 1));
      }
      if (child.activations !=
              std::vector<ActivationSpec>(activations.begin(),
                                          activations.end() - 1) ||
          child.weightings != std::vector<WeightingSpec>(weightings.begin(),
                                                         weightings.end() - 1)) {
        throw ContractError(
            "chain atom sub-function uses different layer specs");
      }
    }
  }

  auto data = std::make_unique<ChainFunctionData>();
  data->depth = depth;
  data->measure = std::move(canon);
  data->activations = std::move(activations);
  data->weightings = std::move(weightings);
  data->total_variation = data->measure.total_variation();
  data->id = content_id(*data);

  FunctionId id = data->id;
  std::unique_lock lock(mutex_);
  functions_.try_emplace(id, std::move(data));
  return id;
}

bool Registry::contains(const FunctionId& id) const {
  std::shared_lock lock(mutex_);
  return functions_.count(id) > 0;
}

const ChainFunctionData& Registry::at(const FunctionId& id) const {
  std::shared_lock lock(mutex_);
  auto it = functions_.find(id);
  if (it == functions_.end()) {
    throw RegistryError("unknown function id: " + id);
  }
  return *it->second;
}

std::size_t Registry::size() const {
  std::shared_lock lock(mutex_);
  return functions_.size();
}

const ChainFunctionData& ChainFunction::data() const {
  if (!registry) {
    throw ContractError("chain function handle has no registry");
  }
  return registry->at(id);
}

}  // namespace crkbs
