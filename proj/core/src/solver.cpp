#include "strn/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "strn/errors.hpp"
#include "strn/scaling.hpp"

namespace strn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void SolverParameters::validate() const {
  if (!(delta0 > 0.0)) throw std::invalid_argument("solver parameters: delta0 must be > 0");
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("solver parameters: theta must lie in (0, 1)");
  if (!(alpha1 > 0.0 && alpha1 <= alpha2 && alpha2 < 1.0))
    throw std::invalid_argument("solver parameters: need 0 < alpha1 <= alpha2 < 1");
  if (!(beta1 > 0.0 && beta1 <= 1.0))
    throw std::invalid_argument("solver parameters: beta1 must lie in (0, 1]");
  if (!(beta2 > 0.0 && beta2 < beta3 && beta3 < 1.0))
    throw std::invalid_argument("solver parameters: need 0 < beta2 < beta3 < 1");
  if (!(gamma > 1.0)) throw std::invalid_argument("solver parameters: gamma must be > 1");
  if (max_iterations < 1)
    throw std::invalid_argument("solver parameters: max_iterations must be >= 1");
  if (max_residual_evals < 1)
    throw std::invalid_argument("solver parameters: max_residual_evals must be >= 1");
  if (!(residual_tol > 0.0))
    throw std::invalid_argument("solver parameters: residual_tol must be > 0");
  if (!(min_delta > 0.0)) throw std::invalid_argument("solver parameters: min_delta must be > 0");
  if (!(stagnation_tol >= 0.0))
    throw std::invalid_argument("solver parameters: stagnation_tol must be >= 0");
  if (!(scaled_grad_tol >= 0.0))
    throw std::invalid_argument("solver parameters: scaled_grad_tol must be >= 0");
}

int termination_code(TerminationReason reason) noexcept { return static_cast<int>(reason); }

std::string_view termination_name(TerminationReason reason) noexcept {
  switch (reason) {
    case TerminationReason::Converged: return "converged";
    case TerminationReason::MaxIterations: return "max_iterations";
    case TerminationReason::MaxEvaluations: return "max_evaluations";
    case TerminationReason::TrustRegionTooSmall: return "trust_region_too_small";
    case TerminationReason::StagnatedResidual: return "stagnated_residual";
    case TerminationReason::SmallScaledGradient: return "small_scaled_gradient";
    case TerminationReason::ScalingFailure: return "scaling_failure";
  }
  return "unknown";
}

bool is_converged(TerminationReason reason) noexcept {
  return reason == TerminationReason::Converged;
}

SolveReport solve(const Problem& problem, const Eigen::VectorXd& x0,
                  const SolverParameters& params, bool record_trace) {
  params.validate();
  if (x0.size() != problem.dimension)
    throw std::invalid_argument("solve: starting point has wrong dimension");
  if (!problem.bounds.strictly_inside(x0))
    throw InvalidStartingPoint("solve: starting point must be strictly inside the box");

  EvalCounter counter;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd residual = evaluate_residual(problem, x, counter);  // x0 failures propagate
  double merit = merit_value(residual);

  double delta = params.delta0;
  int singular_streak = 0;
  std::vector<IterationRecord> trace;

  const auto finish = [&](TerminationReason reason, int iterations) {
    SolveReport report;
    report.final_x = x;
    report.final_residual_norm = residual.norm();
    report.iterations = iterations;
    report.residual_evals = counter.residual_evals;
    report.jacobian_evals = counter.jacobian_evals;
    report.reason = reason;
    report.attempts.push_back({params.theta, iterations, counter.residual_evals,
                               counter.jacobian_evals, report.final_residual_norm, reason});
    if (record_trace) report.trace = std::move(trace);
    return report;
  };

  for (int k = 0;; ++k) {
    if (residual.norm() <= params.residual_tol) return finish(TerminationReason::Converged, k);
    if (k >= params.max_iterations) return finish(TerminationReason::MaxIterations, k);
    if (counter.residual_evals >= params.max_residual_evals)
      return finish(TerminationReason::MaxEvaluations, k);

    const Eigen::MatrixXd jac = evaluate_jacobian(problem, x, residual, counter);
    const Eigen::VectorXd grad = jac.transpose() * residual;

    ScalingDiagonal scaling;
    try {
      scaling = compute_scaling(x, grad, problem.bounds);
    } catch (const ScalingFailure&) {
      return finish(TerminationReason::ScalingFailure, k);
    }
    if (scaled_gradient_norm(scaling, grad) < params.scaled_grad_tol)
      return finish(TerminationReason::SmallScaledGradient, k);

    const ModelContext ctx{merit, grad, jac, residual};
    const std::optional<Eigen::VectorXd> p_newton = newton_step(ctx);

    // Inner acceptance loop. The entry radius is stashed and restored at
    // acceptance; only rejections carry the shrunken radius forward.
    const double delta_entry = delta;
    int rejections = 0;

    Eigen::VectorXd accepted_step;
    Eigen::VectorXd trial_residual;
    double trial_merit = 0.0;
    double rho_actual = 0.0;
    double rho_cauchy = 0.0;
    double scaled_step_norm = 0.0;
    StepKind kind = StepKind::NewtonInterior;

    for (;;) {
      TrialStep trial{};
      CauchyStep cauchy{};
      try {
        trial = dogleg_step(ctx, scaling, p_newton, delta);
        cauchy = cauchy_point(ctx, scaling, delta);
      } catch (const DegenerateModel&) {
        return finish(TerminationReason::StagnatedResidual, k);
      }

      Eigen::VectorXd alpha_p =
          truncate_step(trial.p, step_to_boundary(x, trial.p, problem.bounds), params.theta);
      const Eigen::VectorXd alpha_cauchy = truncate_step(
          cauchy.p, step_to_boundary(x, cauchy.p, problem.bounds), params.theta);

      try {
        rho_cauchy = cauchy_comparison_ratio(ctx, alpha_p, alpha_cauchy);
      } catch (const ZeroCauchyDecrease&) {
        return finish(TerminationReason::SmallScaledGradient, k);
      }
      kind = trial.kind;
      if (rho_cauchy < params.beta1) {
        alpha_p = alpha_cauchy;
        kind = StepKind::CauchyFallback;
      }

      scaled_step_norm = to_scaled(scaling, alpha_p).norm();
      const double predicted = merit - model_value(ctx, alpha_p);
      const double shrunk = std::min(params.alpha1 * delta, params.alpha2 * scaled_step_norm);

      bool trial_finite = true;
      try {
        trial_residual = evaluate_residual(problem, x + alpha_p, counter);
        trial_merit = merit_value(trial_residual);
      } catch (const NonFiniteEvaluation&) {
        trial_finite = false;
      }
      rho_actual = (trial_finite && predicted > 0.0) ? (merit - trial_merit) / predicted : -kInf;

      if (rho_actual >= params.beta2) {
        accepted_step = std::move(alpha_p);
        break;
      }

      ++rejections;
      delta = shrunk;
      if (delta < params.min_delta) return finish(TerminationReason::TrustRegionTooSmall, k);
      if (counter.residual_evals >= params.max_residual_evals)
        return finish(TerminationReason::MaxEvaluations, k);
    }

    // Acceptance: restore the stashed radius, then enlarge if the step was
    // very successful.
    double next_delta = delta_entry;
    if (rho_actual >= params.beta3)
      next_delta = std::max(delta_entry, params.gamma * scaled_step_norm);

    const bool stagnated =
        (trial_residual - residual).norm() <= params.stagnation_tol * residual.norm();
    const bool norm_decreased = trial_residual.norm() < residual.norm();

    x += accepted_step;
    if (record_trace)
      trace.push_back({k, x, trial_residual.norm(), delta_entry, next_delta, kind, rho_cauchy,
                       rho_actual, rejections, scaled_step_norm});
    residual = std::move(trial_residual);
    merit = trial_merit;
    delta = next_delta;

    if (stagnated) return finish(TerminationReason::StagnatedResidual, k + 1);

    // Persistent singular-Jacobian fallback without residual progress also
    // counts as stagnation.
    if (!p_newton && !norm_decreased) {
      if (++singular_streak >= 5) return finish(TerminationReason::StagnatedResidual, k + 1);
    } else {
      singular_streak = 0;
    }
  }
}

std::vector<double> variable_theta_schedule() {
  std::vector<double> schedule;
  schedule.reserve(13);
  for (int i = 0; i <= 12; ++i) schedule.push_back(std::min(0.7 + 0.025 * i, 0.99995));
  return schedule;
}

SolveReport solve_with_variable_theta(const Problem& problem, const Eigen::VectorXd& x0,
                                      const SolverParameters& params, bool record_trace) {
  params.validate();

  std::vector<AttemptSummary> attempts;
  long total_residual_evals = 0;
  long total_jacobian_evals = 0;
  std::optional<SolveReport> best;

  for (const double theta : variable_theta_schedule()) {
    SolverParameters attempt_params = params;
    attempt_params.theta = theta;
    SolveReport report = solve(problem, x0, attempt_params, record_trace);

    total_residual_evals += report.residual_evals;
    total_jacobian_evals += report.jacobian_evals;
    attempts.push_back(report.attempts.front());

    const bool better =
        !best || report.final_residual_norm < best->final_residual_norm;
    if (is_converged(report.reason) || better) {
      best = std::move(report);
      if (is_converged(best->reason)) break;
    }
  }

  best->residual_evals = total_residual_evals;
  best->jacobian_evals = total_jacobian_evals;
  best->attempts = std::move(attempts);
  return *best;
}

}  // namespace strn
