#include "strn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace strn {

Bounds::Bounds(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size())
    throw std::invalid_argument("bounds: lower and upper have different lengths");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i]))
      throw std::invalid_argument("bounds: NaN entry");
    if (!(lower_[i] < upper_[i]))
      throw std::invalid_argument("bounds: lower must be strictly below upper in every coordinate");
  }
}

Bounds Bounds::unbounded(Eigen::Index n) {
  const double inf = std::numeric_limits<double>::infinity();
  return Bounds(Eigen::VectorXd::Constant(n, -inf), Eigen::VectorXd::Constant(n, inf));
}

bool Bounds::fully_unbounded() const noexcept {
  for (Eigen::Index i = 0; i < lower_.size(); ++i)
    if (std::isfinite(lower_[i]) || std::isfinite(upper_[i])) return false;
  return true;
}

bool Bounds::strictly_inside(const Eigen::VectorXd& x) const {
  if (x.size() != lower_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!(lower_[i] < x[i] && x[i] < upper_[i])) return false;
  return true;
}

Eigen::VectorXd project_to_interior(const Eigen::VectorXd& x, const Bounds& bounds,
                                    double margin) {
  if (!(margin > 0.0 && margin < 0.5))
    throw std::invalid_argument("project_to_interior: margin must lie in (0, 0.5)");
  if (x.size() != bounds.size())
    throw std::invalid_argument("project_to_interior: dimension mismatch");

  Eigen::VectorXd y = x;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double l = bounds.lower()[i];
    const double u = bounds.upper()[i];
    const double w = std::min(u - l, 1.0);  // inf - (-inf) = inf, min picks 1
    if (std::isfinite(l)) y[i] = std::max(y[i], l + margin * w);
    if (std::isfinite(u)) y[i] = std::min(y[i], u - margin * w);
  }
  return y;
}

}  // namespace strn
