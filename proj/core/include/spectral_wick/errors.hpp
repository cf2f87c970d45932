#pragma once

#include <stdexcept>
#include <string>

namespace spectral_wick {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter is outside its documented range (H, delta, grid shapes, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A user-supplied spectral density failed the evenness / nonnegativity /
// finiteness spot checks.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Adaptive refinement exhausted its budget without meeting the tolerance.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

// The weighted spectral integral of an argument diverges under cutoff
// doubling, i.e. the function is not in the operator domain.
class DomainViolationError : public Error {
 public:
  using Error::Error;
};

// The frequency grid cannot resolve a feature of the multiplier (band edges
// narrower than a bin).
class GridResolutionError : public Error {
 public:
  using Error::Error;
};

// A Gram matrix stayed indefinite through the whole jitter ladder.
class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

// An integral that the requested quantity needs (e.g. the total mass of the
// density) grows without bound under cutoff doubling.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

// Hermite coefficient order beyond the overflow guard.
class CoefficientOverflowError : public Error {
 public:
  using Error::Error;
};

// Numerical derivative failed its refinement-ladder stability check.
class DerivativeInstabilityError : public Error {
 public:
  using Error::Error;
};

// Configuration file / CLI parameter problem; carries the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : Error("config error at '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

}  // namespace spectral_wick
