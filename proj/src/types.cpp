#include "crkbs/types.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "crkbs/errors.hpp"

namespace crkbs {

double eval_activation(const ActivationSpec& spec, double t) {
  if (!std::isfinite(t)) {
    throw DomainError("activation input is not finite");
  }
  switch (spec.kind) {
    case Activation::relu:
      return t > 0.0 ? t : 0.0;
    case Activation::softplus:
      // log(1 + e^t) overflows for large t; switch to the exact
      // rearrangement t + log(1 + e^-t) past the crossover.
      return t > 30.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
    case Activation::tanh:
      return std::tanh(t);
    case Activation::sigmoid:
      return 1.0 / (1.0 + std::exp(-t));
    case Activation::identity:
      return t;
  }
  throw ContractError("unknown activation kind");
}

ActivationSpec activation_from_name(const std::string& name) {
  if (name == "relu") return {Activation::relu};
  if (name == "softplus") return {Activation::softplus};
  if (name == "tanh") return {Activation::tanh};
  if (name == "sigmoid") return {Activation::sigmoid};
  if (name == "identity") return {Activation::identity};
  throw ContractError("unknown activation name: " + name);
}

const char* activation_name(const ActivationSpec& spec) {
  switch (spec.kind) {
    case Activation::relu: return "relu";
    case Activation::softplus: return "softplus";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
  }
  throw ContractError("unknown activation kind");
}

WeightingSpec weighting_from_name(const std::string& name) {
  if (name == "unit") return {Weighting::unit};
  if (name == "inverse_affine") return {Weighting::inverse_affine};
  if (name == "inverse_norm_bias") return {Weighting::inverse_norm_bias};
  throw ContractError("unknown weighting name: " + name);
}

const char* weighting_name(const WeightingSpec& spec) {
  switch (spec.kind) {
    case Weighting::unit: return "unit";
    case Weighting::inverse_affine: return "inverse_affine";
    case Weighting::inverse_norm_bias: return "inverse_norm_bias";
  }
  throw ContractError("unknown weighting kind");
}

double eval_weighting(const WeightingSpec& spec, const Layer1Atom& atom) {
  if (!atom.v.allFinite() || !std::isfinite(atom.b)) {
    throw DomainError("atom parameters are not finite");
  }
  switch (spec.kind) {
    case Weighting::unit:
      return 1.0;
    case Weighting::inverse_affine:
      return 1.0 / (1.0 + atom.v.norm() + std::abs(atom.b));
    case Weighting::inverse_norm_bias: {
      double denom = atom.v.lpNorm<1>() + std::abs(atom.b);
      if (denom == 0.0) {
        throw DomainError("inverse_norm_bias weighting undefined for the zero atom");
      }
      return 1.0 / denom;
    }
  }
  throw ContractError("unknown weighting kind");
}

double eval_weighting(const WeightingSpec& spec, const ChainAtom& atom,
                      std::optional<double> norm_bound_of_f) {
  if (!std::isfinite(atom.b)) {
    throw DomainError("atom bias is not finite");
  }
  if (spec.kind == Weighting::unit) {
    return 1.0;
  }
  if (!norm_bound_of_f.has_value()) {
    throw ContractError(
        "weighting of a chain atom requires the sub-function norm bound");
  }
  double nu = *norm_bound_of_f;
  if (!std::isfinite(nu) || nu < 0.0) {
    throw DomainError("sub-function norm bound must be finite and nonnegative");
  }
  switch (spec.kind) {
    case Weighting::inverse_affine:
      return 1.0 / (1.0 + nu + std::abs(atom.b));
    case Weighting::inverse_norm_bias: {
      double denom = nu + std::abs(atom.b);
      if (denom == 0.0) {
        throw DomainError("inverse_norm_bias weighting undefined for the zero atom");
      }
      return 1.0 / denom;
    }
    default:
      throw ContractError("unknown weighting kind");
  }
}

namespace {

void append_double_bits(std::string& out, double x) {
  auto bits = std::bit_cast<std::uint64_t>(x);
  char buf[8];
  std::memcpy(buf, &bits, 8);
  out.append(buf, 8);
}

}  // namespace

std::string atom_key(const Atom& a) {
  std::string key;
  if (const auto* l1 = std::get_if<Layer1Atom>(&a)) {
    key.push_back('1');
    for (Eigen::Index i = 0; i < l1->v.size(); ++i) {
      append_double_bits(key, l1->v[i]);
    }
    append_double_bits(key, l1->b);
  } else {
    const auto& ch = std::get<ChainAtom>(a);
    key.push_back('c');
    key.append(std::to_string(ch.layer));
    key.push_back(':');
    key.append(ch.f);
    append_double_bits(key, ch.b);
  }
  return key;
}

bool structurally_equal(const Atom& a, const Atom& b) {
  return atom_key(a) == atom_key(b);
}

double AtomicMeasure::total_variation() const {
  double tv = 0.0;
  for (double c : coeffs) tv += std::abs(c);
  return tv;
}

void AtomicMeasure::validate() const {
  if (atoms.size() != coeffs.size()) {
    throw ContractError("measure has " + std::to_string(atoms.size()) +
                        " atoms but " + std::to_string(coeffs.size()) +
                        " coefficients");
  }
  for (double c : coeffs) {
    if (!std::isfinite(c)) {
      throw DomainError("measure coefficient is not finite");
    }
  }
  bool seen_layer1 = false;
  bool seen_chain = false;
  int chain_layer = 0;
  Eigen::Index dim = -1;
  for (const auto& a : atoms) {
    if (const auto* l1 = std::get_if<Layer1Atom>(&a)) {
      seen_layer1 = true;
      if (!l1->v.allFinite() || !std::isfinite(l1->b)) {
        throw DomainError("atom parameters are not finite");
      }
      if (dim < 0) {
        dim = l1->v.size();
      } else if (l1->v.size() != dim) {
        throw ContractError("first-layer atoms have mixed input dimensions");
      }
    } else {
      const auto& ch = std::get<ChainAtom>(a);
      seen_chain = true;
      if (!std::isfinite(ch.b)) {
        throw DomainError("atom parameters are not finite");
      }
      if (ch.layer < 2) {
        throw ContractError("chain atoms live at layer 2 or deeper");
      }
      if (chain_layer == 0) {
        chain_layer = ch.layer;
      } else if (ch.layer != chain_layer) {
        throw ContractError("measure mixes atoms from different layers");
      }
    }
  }
  if (seen_layer1 && seen_chain) {
    throw ContractError("measure mixes first-layer and chain atoms");
  }
}

AtomicMeasure canonicalize(const AtomicMeasure& m) {
  m.validate();
  AtomicMeasure out;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < m.atoms.size(); ++j) {
    std::string key = atom_key(m.atoms[j]);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(std::move(key), out.atoms.size());
      out.atoms.push_back(m.atoms[j]);
      out.coeffs.push_back(m.coeffs[j]);
    } else {
      out.coeffs[it->second] += m.coeffs[j];
    }
  }
  // Drop exact zeros, preserving the order of the survivors.
  AtomicMeasure pruned;
  for (std::size_t j = 0; j < out.atoms.size(); ++j) {
    if (out.coeffs[j] != 0.0) {
      pruned.atoms.push_back(std::move(out.atoms[j]));
      pruned.coeffs.push_back(out.coeffs[j]);
    }
  }
  return pruned;
}

}  // namespace crkbs
