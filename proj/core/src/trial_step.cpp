#include "strn/trial_step.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "strn/errors.hpp"

namespace strn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::optional<Eigen::VectorXd> newton_step(const ModelContext& ctx) {
  const Eigen::Index n = ctx.jacobian.rows();
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(ctx.jacobian);
  // Partial pivoting leaves the pivots on U's diagonal; a pivot at or below
  // n * eps * ||J||_inf flags rank deficiency.
  const double norm_inf = ctx.jacobian.cwiseAbs().rowwise().sum().maxCoeff();
  const double tol = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * norm_inf;
  const double min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (!(min_pivot > tol)) return std::nullopt;
  Eigen::VectorXd p = lu.solve(-ctx.residual);
  if (!p.allFinite()) return std::nullopt;
  return p;
}

double model_value(const ModelContext& ctx, const Eigen::VectorXd& p) {
  return 0.5 * (ctx.jacobian * p + ctx.residual).squaredNorm();
}

double dogleg_segment_fraction(const Eigen::VectorXd& q_u, const Eigen::VectorXd& q_n,
                               double delta) {
  const Eigen::VectorXd w = q_n - q_u;
  const double a = w.squaredNorm();
  const double b = q_u.dot(w);
  const double c = q_u.squaredNorm() - delta * delta;
  if (a <= 0.0) throw std::invalid_argument("dogleg_segment_fraction: coincident endpoints");
  // c < 0 and a > 0, so the roots have opposite signs; take the positive one
  // without subtractive cancellation.
  const double disc = std::sqrt(b * b - a * c);
  return b <= 0.0 ? (disc - b) / a : -c / (b + disc);
}

TrialStep dogleg_step(const ModelContext& ctx, const ScalingDiagonal& scaling,
                      const std::optional<Eigen::VectorXd>& p_newton, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("dogleg_step: delta must be positive");

  if (p_newton) {
    const double newton_scaled = to_scaled(scaling, *p_newton).norm();
    if (newton_scaled <= delta)
      return {*p_newton, StepKind::NewtonInterior, newton_scaled};
  }

  const Eigen::VectorXd g_scaled = ctx.grad.cwiseQuotient(scaling.d);  // D^-1 g
  const Eigen::VectorXd dinv2_g = apply_inverse_squared(scaling, ctx.grad);
  const double g_scaled_sq = g_scaled.squaredNorm();
  const double curvature = (ctx.jacobian * dinv2_g).squaredNorm();  // ||J D^-2 g||^2
  if (curvature <= 0.0)
    throw DegenerateModel("model is flat along the scaled steepest-descent direction");

  const double tau_star = g_scaled_sq / curvature;
  const Eigen::VectorXd q_u = -tau_star * g_scaled;
  const double q_u_norm = q_u.norm();

  if (q_u_norm >= delta) {
    const double g_scaled_norm = std::sqrt(g_scaled_sq);
    const Eigen::VectorXd q = -(delta / g_scaled_norm) * g_scaled;
    Eigen::VectorXd p = from_scaled(scaling, q);
    return {std::move(p), StepKind::SteepestDescentClipped, q.norm()};
  }

  if (p_newton) {
    const Eigen::VectorXd q_n = to_scaled(scaling, *p_newton);
    const double t = dogleg_segment_fraction(q_u, q_n, delta);
    const Eigen::VectorXd q = q_u + t * (q_n - q_u);
    Eigen::VectorXd p = from_scaled(scaling, q);
    return {std::move(p), StepKind::DoglegInterpolated, q.norm()};
  }

  Eigen::VectorXd p = from_scaled(scaling, q_u);
  return {std::move(p), StepKind::CauchyFallback, q_u_norm};
}

CauchyStep cauchy_point(const ModelContext& ctx, const ScalingDiagonal& scaling, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("cauchy_point: delta must be positive");
  const Eigen::VectorXd dinv2_g = apply_inverse_squared(scaling, ctx.grad);
  const double g_scaled_sq = ctx.grad.cwiseQuotient(scaling.d).squaredNorm();
  const double curvature = (ctx.jacobian * dinv2_g).squaredNorm();
  if (curvature <= 0.0)
    throw DegenerateModel("model is flat along the scaled steepest-descent direction");
  const double g_scaled_norm = std::sqrt(g_scaled_sq);
  const double tau = std::min(g_scaled_sq / curvature, delta / g_scaled_norm);
  return {-tau * dinv2_g, tau};
}

double step_to_boundary(const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                        const Bounds& bounds) {
  if (x.size() != p.size() || x.size() != bounds.size())
    throw std::invalid_argument("step_to_boundary: dimension mismatch");
  double lambda = kInf;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    // For strictly interior x one ratio is positive toward the bound ahead,
    // the other negative (or infinite); max picks the distance ahead.
    const double r1 = (bounds.lower()[i] - x[i]) / p[i];
    const double r2 = (bounds.upper()[i] - x[i]) / p[i];
    lambda = std::min(lambda, std::max(r1, r2));
  }
  return lambda;
}

Eigen::VectorXd truncate_step(const Eigen::VectorXd& p, double lambda, double theta) {
  if (!(theta > 0.0 && theta < 1.0))
    throw std::invalid_argument("truncate_step: theta must lie in (0, 1)");
  if (lambda > 1.0) return p;
  const double factor = std::max(theta, 1.0 - p.norm()) * lambda;
  return factor * p;
}

double cauchy_comparison_ratio(const ModelContext& ctx, const Eigen::VectorXd& alpha_p,
                               const Eigen::VectorXd& alpha_cauchy) {
  const double cauchy_decrease = ctx.merit - model_value(ctx, alpha_cauchy);
  if (!(cauchy_decrease > 0.0))
    throw ZeroCauchyDecrease("truncated Cauchy step yields no model decrease");
  return (ctx.merit - model_value(ctx, alpha_p)) / cauchy_decrease;
}

double actual_to_predicted_ratio(const ModelContext& ctx, const Eigen::VectorXd& alpha_p,
                                 double trial_merit) {
  const double predicted = ctx.merit - model_value(ctx, alpha_p);
  if (!(predicted > 0.0))
    throw NonPositivePredictedDecrease("trial step predicts no model decrease");
  return (ctx.merit - trial_merit) / predicted;
}

std::string_view step_kind_name(StepKind kind) noexcept {
  switch (kind) {
    case StepKind::NewtonInterior: return "newton_interior";
    case StepKind::SteepestDescentClipped: return "steepest_descent_clipped";
    case StepKind::DoglegInterpolated: return "dogleg_interpolated";
    case StepKind::CauchyFallback: return "cauchy_fallback";
  }
  return "unknown";
}

}  // namespace strn
