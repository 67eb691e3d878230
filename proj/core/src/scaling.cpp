#include "strn/scaling.hpp"

#include <cmath>
#include <stdexcept>

#include "strn/errors.hpp"

namespace strn {

ScalingDiagonal compute_scaling(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                                const Bounds& bounds) {
  const Eigen::Index n = bounds.size();
  if (x.size() != n || grad.size() != n)
    throw std::invalid_argument("compute_scaling: dimension mismatch");
  if (!bounds.strictly_inside(x))
    throw std::invalid_argument("compute_scaling: point is not strictly inside the box");

  ScalingDiagonal s;
  s.v.resize(n);
  s.d.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double v;
    if (grad[i] < 0.0)
      v = std::isfinite(bounds.upper()[i]) ? x[i] - bounds.upper()[i] : -1.0;
    else
      v = std::isfinite(bounds.lower()[i]) ? x[i] - bounds.lower()[i] : 1.0;
    const double av = std::abs(v);
    if (av < 1e-300)
      throw ScalingFailure("scaling denominator underflow in coordinate " + std::to_string(i));
    s.v[i] = v;
    s.d[i] = 1.0 / std::sqrt(av);
  }
  return s;
}

Eigen::VectorXd to_scaled(const ScalingDiagonal& s, const Eigen::VectorXd& p) {
  return s.d.cwiseProduct(p);
}

Eigen::VectorXd from_scaled(const ScalingDiagonal& s, const Eigen::VectorXd& p) {
  return p.cwiseQuotient(s.d);
}

Eigen::VectorXd apply_inverse_squared(const ScalingDiagonal& s, const Eigen::VectorXd& p) {
  return p.cwiseQuotient(s.d.cwiseProduct(s.d));
}

double scaled_gradient_norm(const ScalingDiagonal& s, const Eigen::VectorXd& grad) {
  return grad.cwiseQuotient(s.d).norm();
}

}  // namespace strn
