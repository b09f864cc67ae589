#pragma once

#include <stdexcept>
#include <string>

namespace pwiener {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad geometry, bad parameters).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or schema-violating experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical stage failed (non-convergence, degenerate data).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Iterative minimization did not reach its tolerance.
class ConvergenceError : public NumericError {
 public:
  ConvergenceError(const std::string& what, double last_energy, int iterations)
      : NumericError(what), last_energy_(last_energy), iterations_(iterations) {}

  double last_energy() const noexcept { return last_energy_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double last_energy_;
  int iterations_;
};

}  // namespace pwiener
