#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace strn {

// Base class for every error the library raises on purpose. Programming
// mistakes (bad dimensions, invalid parameter values) throw
// std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A residual or Jacobian evaluation produced NaN or +/-inf. Raised by the
// evaluation wrappers; the solver treats it as "reject this trial point"
// except at the starting point, where it propagates to the caller.
class NonFiniteEvaluation : public Error {
 public:
  using Error::Error;
};

// A scaling denominator |v_i| underflowed below 1e-300; the iterate sits too
// close to a bound for the scaled model to be formed.
class ScalingFailure : public Error {
 public:
  using Error::Error;
};

// ||F' D^-2 grad|| vanished while grad != 0: the model is rank-deficient
// along the scaled steepest-descent direction and no trial step exists.
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

// The truncated Cauchy step produced no model decrease (denominator of the
// Cauchy comparison ratio is <= 0).
class ZeroCauchyDecrease : public Error {
 public:
  using Error::Error;
};

// The predicted model decrease of a trial step is <= 0, so the
// actual-to-predicted ratio is undefined.
class NonPositivePredictedDecrease : public Error {
 public:
  using Error::Error;
};

// The starting point is not strictly inside the box.
class InvalidStartingPoint : public Error {
 public:
  using Error::Error;
};

// Source-located error from the expression or problem-file parsers.
class ParseError : public Error {
 public:
  ParseError(std::string message, int line, int column)
      : Error(std::move(message)), line_(line), column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

class SyntaxError : public ParseError {
 public:
  using ParseError::ParseError;
};

class UnknownIdentifier : public ParseError {
 public:
  using ParseError::ParseError;
};

class VariableIndexOutOfRange : public ParseError {
 public:
  using ParseError::ParseError;
};

// Structural problem-file error (missing section, count mismatch,
// non-interior start, ...). `line()` points at the offending line.
class FormatError : public ParseError {
 public:
  FormatError(std::string message, int line) : ParseError(std::move(message), line, 0) {}
};

// Lookup of a problem name that is not registered. Carries near-miss
// suggestions for the CLI.
class UnknownProblem : public Error {
 public:
  UnknownProblem(std::string message, std::vector<std::string> suggestions = {})
      : Error(std::move(message)), suggestions_(std::move(suggestions)) {}

  const std::vector<std::string>& suggestions() const noexcept { return suggestions_; }

 private:
  std::vector<std::string> suggestions_;
};

// A sweep specification whose substituted parameter values violate the
// solver-parameter invariants, or that is otherwise unrunnable.
class InvalidSweep : public Error {
 public:
  using Error::Error;
};

// Records from more than one swept parameter were passed to an analysis that
// requires a single-parameter sweep.
class MixedSweep : public Error {
 public:
  using Error::Error;
};

}  // namespace strn
