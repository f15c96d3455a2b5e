#pragma once

#include <stdexcept>
#include <string>

namespace semicircle {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Non-finite entries, bad shapes, or otherwise invalid input values.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A matrix expected to be positive definite has an eigenvalue below the floor.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

class NotSelfAdjoint : public Error {
 public:
  using Error::Error;
};

class SingularScaling : public Error {
 public:
  using Error::Error;
};

/// An iterative solver failed to reach its tolerance.
class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// A precondition on a map (doubly stochastic, trace minimal, ...) is not met.
class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

}  // namespace semicircle
