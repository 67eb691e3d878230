#pragma once

#include <Eigen/Core>
#include <optional>
#include <string_view>

#include "strn/bounds.hpp"
#include "strn/scaling.hpp"

namespace strn {

// Everything the Gauss-Newton model m(p) = 0.5 * ||jacobian * p + residual||^2
// needs at the current iterate. grad must equal jacobian^T * residual.
struct ModelContext {
  double merit;  // 0.5 * ||residual||^2 == m(0)
  Eigen::VectorXd grad;
  Eigen::MatrixXd jacobian;
  Eigen::VectorXd residual;
};

enum class StepKind {
  NewtonInterior,         // full Newton step, already inside the scaled radius
  SteepestDescentClipped, // scaled steepest-descent step clipped to the radius
  DoglegInterpolated,     // point on the segment between the two, on the sphere
  CauchyFallback          // unconstrained scaled Cauchy minimizer (no Newton step)
};

// Snake-case label for traces and CLI output, e.g. "newton_interior".
std::string_view step_kind_name(StepKind kind) noexcept;

struct TrialStep {
  Eigen::VectorXd p;   // step in original variables
  StepKind kind;
  double scaled_norm;  // ||D p||
};

// Solves jacobian * p = -residual by partial-pivot LU. Returns nullopt when
// the factorization flags rank deficiency (some pivot magnitude at or below
// n * eps * ||jacobian||_inf) or the solution is not finite.
std::optional<Eigen::VectorXd> newton_step(const ModelContext& ctx);

// m(p) for the Gauss-Newton model above.
double model_value(const ModelContext& ctx, const Eigen::VectorXd& p);

// Dogleg in scaled variables q = D p, minimizing the model subject to
// ||q|| <= delta:
//   (a) if a Newton step is available and ||D p_newton|| <= delta, take it;
//   (b) otherwise form the unconstrained scaled steepest-descent minimizer
//       q_u = -(||D^-1 g||^2 / ||J D^-2 g||^2) D^-1 g;
//   (c) if ||q_u|| >= delta, return the clipped steepest step
//       q = -delta * D^-1 g / ||D^-1 g||;
//   (d) if a Newton step exists, interpolate q_u -> D p_newton onto the
//       sphere of radius delta;
//   (e) with no Newton step and ||q_u|| < delta, return q_u itself.
// Throws DegenerateModel when ||J D^-2 g|| = 0 while g != 0.
TrialStep dogleg_step(const ModelContext& ctx, const ScalingDiagonal& scaling,
                      const std::optional<Eigen::VectorXd>& p_newton, double delta);

// Positive fraction t solving ||q_u + t (q_n - q_u)|| = delta, for
// ||q_u|| < delta <= ||q_n||. Evaluated with the cancellation-free form of
// the quadratic formula.
double dogleg_segment_fraction(const Eigen::VectorXd& q_u, const Eigen::VectorXd& q_n,
                               double delta);

// The scaled Cauchy point p_c = -tau * D^-2 g with
// tau = min(||D^-1 g||^2 / ||J D^-2 g||^2, delta / ||D^-1 g||).
// Throws DegenerateModel exactly like dogleg_step.
struct CauchyStep {
  Eigen::VectorXd p;
  double tau;
};
CauchyStep cauchy_point(const ModelContext& ctx, const ScalingDiagonal& scaling, double delta);

// Largest multiple of p that stays in the box: +inf when the box is all of
// R^n or p = 0, else min over p_i != 0 of
// max((l_i - x_i)/p_i, (u_i - x_i)/p_i). Requires x strictly interior.
double step_to_boundary(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                        const Bounds& bounds);

// Feasibility truncation: the full step when lambda > 1, otherwise
// max(theta, 1 - ||p||) * lambda * p, which keeps x + result strictly
// interior since the factor is strictly below lambda.
Eigen::VectorXd truncate_step(const Eigen::VectorXd& p, double lambda, double theta);

// Model-decrease ratio of the truncated trial step against the truncated
// Cauchy step: (m(0) - m(alpha_p)) / (m(0) - m(alpha_cauchy)).
// Throws ZeroCauchyDecrease when the denominator is <= 0.
double cauchy_comparison_ratio(const ModelContext& ctx, const Eigen::VectorXd& alpha_p,
                               const Eigen::VectorXd& alpha_cauchy);

// Actual-to-predicted decrease ratio
// (merit(x) - merit_trial) / (m(0) - m(alpha_p)).
// Throws NonPositivePredictedDecrease when the predicted decrease is <= 0.
double actual_to_predicted_ratio(const ModelContext& ctx, const Eigen::VectorXd& alpha_p,
                                 double trial_merit);

}  // namespace strn
