#pragma once

#include <stdexcept>
#include <string>

namespace phaseloss {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Probe parameters that do not describe a physical state (e.g. n_sq > n_mean).
class InvalidProbe : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The requested bound diverges at the channel endpoints eta = 0 or eta = 1.
class SingularChannel : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock space is too small for the requested state.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double tail_mass)
      : Error(what), tail_mass_(tail_mass) {}

  double tail_mass() const noexcept { return tail_mass_; }

 private:
  double tail_mass_;
};

/// Numerical procedure failed (non-converged derivative, lost positivity, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent experiment or command configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace phaseloss
