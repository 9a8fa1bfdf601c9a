#pragma once

#include <stdexcept>
#include <string>

namespace dimsim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad dimensions, bad angle, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class UnknownNameError : public Error {
 public:
  using Error::Error;
};

/// Lagrange basis cannot be formed because two abscissae coincide.
class DegenerateBasisError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

/// Reconstructed coefficients do not satisfy the order conditions.
class ReconstructionError : public Error {
 public:
  using Error::Error;
};

/// Stage matrix I - z0 A - z1 A* is singular (z1 = 1/lambda).
class PoleError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A step failed; carries the index of the failing step.
class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, long step_index)
      : Error(what + " (step " + std::to_string(step_index) + ")"), step_index_(step_index) {}
  long step_index() const { return step_index_; }

 private:
  long step_index_;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace dimsim
