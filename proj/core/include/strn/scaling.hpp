#pragma once

#include <Eigen/Core>

#include "strn/bounds.hpp"

namespace strn {

// The affine scaling diagonal D(x) = diag(|v_i(x)|^(-1/2)) built from the
// gradient of the merit function and the distances to the active-side
// bounds. This follows the standard Coleman-Li definition: the bound that
// matters for coordinate i is the one the negative gradient points toward
// (upper for grad_i < 0, lower for grad_i >= 0), and v_i falls back to a
// unit value whenever that bound is infinite:
//
//   grad_i <  0, u_i finite    -> v_i = x_i - u_i
//   grad_i >= 0, l_i finite    -> v_i = x_i - l_i
//   grad_i <  0, u_i = +inf    -> v_i = -1
//   grad_i >= 0, l_i = -inf    -> v_i = +1
//
// On a fully unbounded problem every |v_i| = 1, so D = I and the method
// reduces to a plain (unscaled) trust-region iteration.
struct ScalingDiagonal {
  Eigen::VectorXd v;  // signed distances (or +/-1), as defined above
  Eigen::VectorXd d;  // d_i = |v_i|^(-1/2)
};

// Throws ScalingFailure when any |v_i| < 1e-300 (the iterate is numerically
// glued to a bound) and std::invalid_argument on dimension mismatch or a
// non-interior x.
ScalingDiagonal compute_scaling(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                                const Bounds& bounds);

// D p — maps a step into scaled space.
Eigen::VectorXd to_scaled(const ScalingDiagonal& s, const Eigen::VectorXd& p);

// D^-1 p — maps a scaled-space step back.
Eigen::VectorXd from_scaled(const ScalingDiagonal& s, const Eigen::VectorXd& p);

// D^-2 p.
Eigen::VectorXd apply_inverse_squared(const ScalingDiagonal& s, const Eigen::VectorXd& p);

// ||D^-1 grad||, the norm the small-scaled-gradient termination test uses.
double scaled_gradient_norm(const ScalingDiagonal& s, const Eigen::VectorXd& grad);

}  // namespace strn
