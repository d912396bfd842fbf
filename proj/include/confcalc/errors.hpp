#pragma once

#include <stdexcept>
#include <string>

namespace confcalc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates the declared bounds of a domain type (e.g. an order outside (0,1]).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An operation was asked for a point outside its domain (t <= a, t < a, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A user function was undefined (or non-finite) at a point the algorithm needed.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// A conformable integral was found to diverge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature neither converged nor could be classified as divergent.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// The adaptive ODE step controller could not meet the tolerance.
class StepFailure : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration ran out of iterations.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, double last_change)
      : Error(what), last_change_(last_change) {}
  double last_change() const noexcept { return last_change_; }

 private:
  double last_change_;
};

/// The arguments do not meet the hypotheses of an identity check.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

}  // namespace confcalc
