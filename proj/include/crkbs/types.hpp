#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace crkbs {

// ---------------------------------------------------------------------------
// Activations

enum class Activation { relu, softplus, tanh, sigmoid, identity };

struct ActivationSpec {
  Activation kind = Activation::relu;

  friend bool operator==(const ActivationSpec&, const ActivationSpec&) =
      default;
};

// Applies the activation pointwise. Throws DomainError on non-finite input.
double eval_activation(const ActivationSpec& spec, double t);

ActivationSpec activation_from_name(const std::string& name);
const char* activation_name(const ActivationSpec& spec);

// ---------------------------------------------------------------------------
// Atoms

// Identifies an interned chain function by its content hash (hex SHA-256).
using FunctionId = std::string;

// Parameter of a first-layer unit: x -> sigma(<v, x> + b).
struct Layer1Atom {
  Eigen::VectorXd v;
  double b = 0.0;
};

// Parameter of a unit at layer >= 2: x -> sigma(f(x) + b) where f is an
// interned chain function of depth layer - 1.
struct ChainAtom {
  int layer = 2;
  FunctionId f;
  double b = 0.0;
};

using Atom = std::variant<Layer1Atom, ChainAtom>;

// Bitwise equality of the parameters (doubles compared by bit pattern, so
// -0.0 != +0.0 and NaN == NaN with the same payload).
bool structurally_equal(const Atom& a, const Atom& b);

// Byte string keying an atom for hashing and duplicate detection; two atoms
// map to the same key iff structurally_equal.
std::string atom_key(const Atom& a);

// ---------------------------------------------------------------------------
// Weightings

enum class Weighting { unit, inverse_affine, inverse_norm_bias };

struct WeightingSpec {
  Weighting kind = Weighting::unit;

  friend bool operator==(const WeightingSpec&, const WeightingSpec&) = default;
};

WeightingSpec weighting_from_name(const std::string& name);
const char* weighting_name(const WeightingSpec& spec);

// Weighting value beta(w) for a first-layer atom:
//   unit              -> 1
//   inverse_affine    -> 1 / (1 + |v|_2 + |b|)
//   inverse_norm_bias -> 1 / (|v|_1 + |b|)
// The last is undefined when |v|_1 + |b| = 0 (DomainError).
double eval_weighting(const WeightingSpec& spec, const Layer1Atom& atom);

// Weighting value for a chain atom. `norm_bound_of_f` is a norm upper bound
// nu(f) of the atom's sub-function and is required for the non-unit kinds:
//   unit              -> 1
//   inverse_affine    -> 1 / (1 + nu(f) + |b|)
//   inverse_norm_bias -> 1 / (nu(f) + |b|), undefined when zero.
double eval_weighting(const WeightingSpec& spec, const ChainAtom& atom,
                      std::optional<double> norm_bound_of_f = std::nullopt);

// ---------------------------------------------------------------------------
// Atomic measures

// Finite signed combination of point masses: sum_j coeffs[j] * delta(atoms[j]).
// Atoms must be homogeneous: all Layer1Atom or all ChainAtom with one layer
// index, and all Layer1Atom v's of one dimension.
struct AtomicMeasure {
  std::vector<Atom> atoms;
  std::vector<double> coeffs;

  std::size_t size() const { return atoms.size(); }
  double total_variation() const;

  // Throws ContractError/DomainError if the structure is invalid.
  void validate() const;
};

// Merges structurally equal atoms (summing coefficients), drops atoms whose
// coefficient is exactly zero, and keeps first-occurrence order. Idempotent.
AtomicMeasure canonicalize(const AtomicMeasure& m);

}  // namespace crkbs
