#pragma once

#include <Eigen/Core>
#include <optional>
#include <string_view>
#include <vector>

#include "strn/problem.hpp"
#include "strn/trial_step.hpp"

namespace strn {

// Tuning knobs of the scaled trust-region Newton iteration. The defaults are
// the reference configuration the whole test suite and the sweep harness are
// anchored to.
struct SolverParameters {
  double delta0 = 1.0;      // initial trust-region radius, > 0
  double theta = 0.99995;   // boundary truncation factor, in (0, 1)
  double alpha1 = 0.25;     // radius shrink factor, 0 < alpha1 <= alpha2 < 1
  double alpha2 = 0.5;      // step-relative shrink factor
  double beta1 = 0.1;       // Cauchy comparison threshold, in (0, 1]
  double beta2 = 0.25;      // acceptance threshold, 0 < beta2 < beta3 < 1
  double beta3 = 0.75;      // enlargement threshold
  double gamma = 2.0;       // radius enlargement factor, > 1

  int max_iterations = 1000;
  long max_residual_evals = 2000;
  double residual_tol = 1e-8;      // convergence: ||F|| <= residual_tol
  double min_delta = 1e-8;         // failure: working radius below this
  double stagnation_tol = 1e-14;   // failure: ||F_new - F|| <= tol * ||F||
  double scaled_grad_tol = 1e-14;  // failure: ||D^-1 grad|| below this

  // Throws std::invalid_argument naming the violated rule.
  void validate() const;
};

enum class TerminationReason {
  Converged = 0,
  MaxIterations = 1,
  MaxEvaluations = 2,
  TrustRegionTooSmall = 3,
  StagnatedResidual = 4,
  SmallScaledGradient = 5,
  ScalingFailure = 6,
};

int termination_code(TerminationReason reason) noexcept;
std::string_view termination_name(TerminationReason reason) noexcept;
bool is_converged(TerminationReason reason) noexcept;

// One accepted outer iteration. delta_before is the radius at iteration
// entry (the stashed value restored at acceptance); delta_after is the
// radius handed to the next iteration, which differs from delta_before only
// when the enlargement rule fired. Both are recorded bit-exactly so audits
// can recompute delta_after == max(delta_before, gamma * scaled_step_norm).
struct IterationRecord {
  int k = 0;
  Eigen::VectorXd x;     // accepted iterate x_{k+1}
  double residual_norm = 0.0;
  double delta_before = 0.0;
  double delta_after = 0.0;
  StepKind step_kind = StepKind::NewtonInterior;
  double rho_cauchy = 0.0;     // last computed Cauchy comparison ratio
  double rho_actual = 0.0;     // accepted actual-to-predicted ratio
  int inner_rejections = 0;
  double scaled_step_norm = 0.0;  // ||D alpha(p)|| of the accepted step
};

// Summary of a single solve attempt (one theta value).
struct AttemptSummary {
  double theta = 0.0;
  int iterations = 0;
  long residual_evals = 0;
  long jacobian_evals = 0;
  double final_residual_norm = 0.0;
  TerminationReason reason = TerminationReason::Converged;
};

// Result of solve / solve_with_variable_theta. For the variable-theta
// driver, residual_evals and jacobian_evals accumulate over all attempts
// while iterations and the final point describe the returned attempt; the
// attempts list carries one summary per theta tried (length 1 for a plain
// solve).
struct SolveReport {
  Eigen::VectorXd final_x;
  double final_residual_norm = 0.0;
  int iterations = 0;
  long residual_evals = 0;
  long jacobian_evals = 0;
  TerminationReason reason = TerminationReason::Converged;
  std::vector<AttemptSummary> attempts;
  std::optional<std::vector<IterationRecord>> trace;
};

// Runs the scaled trust-region Newton iteration from x0, which must be
// strictly inside the box (InvalidStartingPoint otherwise). Evaluation
// failures at x0 propagate; evaluation failures at trial points reject the
// trial and shrink the radius. All iterates remain strictly feasible.
SolveReport solve(const Problem& problem, const Eigen::VectorXd& x0,
                  const SolverParameters& params = {}, bool record_trace = false);

// Restart strategy: runs solve with theta = 0.7 + 0.025 * i for i = 0..12
// (the final value capped at 0.99995 to keep theta < 1), each attempt
// starting fresh from x0 with the given delta0. Returns as soon as an
// attempt converges; otherwise returns the attempt with the smallest final
// residual norm, with every attempt summarized in `attempts`.
SolveReport solve_with_variable_theta(const Problem& problem, const Eigen::VectorXd& x0,
                                      const SolverParameters& params = {},
                                      bool record_trace = false);

// The 13-value theta schedule used by solve_with_variable_theta.
std::vector<double> variable_theta_schedule();

}  // namespace strn
