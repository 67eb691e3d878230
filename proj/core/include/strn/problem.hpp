#pragma once

#include <Eigen/Core>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "strn/bounds.hpp"

namespace strn {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

// Tallies of evaluator invocations. Finite-difference Jacobians consume
// residual evaluations (n of them); jacobian_evals counts only calls to an
// analytic Jacobian.
struct EvalCounter {
  long residual_evals = 0;
  long jacobian_evals = 0;
};

// A square nonlinear system F(x) = 0 on a box. `jacobian` may be empty, in
// which case callers fall back to finite differences. `equations` optionally
// carries the textual form of each residual component (needed to serialize
// the problem to a .nls file).
struct Problem {
  std::string name;
  Eigen::Index dimension;
  ResidualFn residual;
  JacobianFn jacobian;  // empty => finite differences
  Bounds bounds;
  std::vector<Eigen::VectorXd> starting_points;
  std::optional<Eigen::VectorXd> known_solution;
  std::vector<std::string> equations;

  Problem(std::string name_, ResidualFn residual_, JacobianFn jacobian_, Bounds bounds_,
          std::vector<Eigen::VectorXd> starting_points_ = {},
          std::optional<Eigen::VectorXd> known_solution_ = std::nullopt,
          std::vector<std::string> equations_ = {});

  bool has_analytic_jacobian() const noexcept { return static_cast<bool>(jacobian); }
};

// Evaluates F(x), bumping counter.residual_evals. Throws NonFiniteEvaluation
// if any component is NaN or infinite, and std::invalid_argument on a
// dimension mismatch (of x or of the evaluator's output).
Eigen::VectorXd evaluate_residual(const Problem& problem, const Eigen::VectorXd& x,
                                  EvalCounter& counter);

// 0.5 * ||residual||^2 for an already-computed residual. No evaluation.
double merit_value(const Eigen::VectorXd& residual);

// Convenience: evaluates the residual (one counted evaluation) and returns
// the merit value.
double evaluate_merit(const Problem& problem, const Eigen::VectorXd& x, EvalCounter& counter);

// Evaluates the analytic Jacobian (bumping jacobian_evals) or, if none is
// registered, a finite-difference approximation. Throws NonFiniteEvaluation
// on non-finite entries.
Eigen::MatrixXd evaluate_jacobian(const Problem& problem, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& residual_at_x, EvalCounter& counter);

// One-sided difference columns (F(x + h e_j) - F(x)) / h with
// h_j = sqrt(eps) * max(|x_j|, 1). The step is flipped to -h_j whenever
// x_j + h_j would reach or cross the upper bound, so every perturbed point
// stays inside the box (assuming the box is wider than h). Consumes n
// residual evaluations.
Eigen::MatrixXd finite_difference_jacobian(const Problem& problem, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& residual_at_x,
                                           EvalCounter& counter);

}  // namespace strn
