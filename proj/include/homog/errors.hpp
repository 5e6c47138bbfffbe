#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace homog {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Grid or coefficient array has the wrong size or layout.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Fine-grid resolution is not commensurate with the rescaling factor.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// An input violates a documented precondition (non-elliptic matrix, nonzero mean, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Inputs that must describe the same problem do not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Iterative solver hit its iteration cap.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}

  const std::vector<double>& residual_history() const { return history_; }
  double final_residual() const { return history_.empty() ? 0.0 : history_.back(); }

 private:
  std::vector<double> history_;
};

/// Rate fit refused: too few points or errors at the solver floor.
class DegenerateFitError : public Error {
 public:
  using Error::Error;
};

}  // namespace homog
