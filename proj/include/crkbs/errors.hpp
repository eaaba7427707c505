#pragma once

#include <stdexcept>
#include <string>

namespace crkbs {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated a documented precondition (shape mismatch, missing
// argument, inconsistent structure).
class ContractError : public Error {
 public:
  using Error::Error;
};

// A numeric input is outside the function's domain (non-finite value,
// degenerate weighting denominator).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A function reference does not resolve in the registry.
class RegistryError : public Error {
 public:
  using Error::Error;
};

// An input file violates its schema. `pointer` locates the offending
// element (JSON pointer for JSON files, "row N" for CSV).
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& message)
      : Error(pointer + ": " + message), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// Network extraction failed: the selected basis at `layer` cannot
// reproduce some reachable function on the data within tolerance.
class ExtractionError : public Error {
 public:
  ExtractionError(int layer, double residual, const std::string& message)
      : Error(message), layer_(layer), residual_(residual) {}
  int layer() const { return layer_; }
  double residual() const { return residual_; }

 private:
  int layer_;
  double residual_;
};

// The ERM pipeline hit a degenerate state (dead candidate pool).
class FitError : public Error {
 public:
  FitError(int layer, const std::string& message)
      : Error(message), layer_(layer) {}
  int layer() const { return layer_; }

 private:
  int layer_;
};

// A linear system has no solution (empty basis against nonzero values).
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

}  // namespace crkbs
