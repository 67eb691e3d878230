#pragma once

#include <Eigen/Core>

namespace strn {

// Box constraints l <= x <= u with entries in [-inf, +inf]. Every finite
// pair must satisfy l_i < u_i; iterates are kept strictly inside.
class Bounds {
 public:
  // Throws std::invalid_argument on size mismatch, any NaN entry, or any
  // coordinate with lower_i >= upper_i.
  Bounds(Eigen::VectorXd lower, Eigen::VectorXd upper);

  static Bounds unbounded(Eigen::Index n);

  const Eigen::VectorXd& lower() const noexcept { return lower_; }
  const Eigen::VectorXd& upper() const noexcept { return upper_; }
  Eigen::Index size() const noexcept { return lower_.size(); }

  // True when every bound is infinite (the box is all of R^n).
  bool fully_unbounded() const noexcept;

  // Strict interiority: l_i < x_i < u_i for all i.
  bool strictly_inside(const Eigen::VectorXd& x) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

// Clips x so that every finite-bounded coordinate ends up at least
// margin * w_i away from its bound, where w_i = min(u_i - l_i, 1).
// margin must lie in (0, 0.5). Interior coordinates that already satisfy the
// margin are returned unchanged.
Eigen::VectorXd project_to_interior(const Eigen::VectorXd& x, const Bounds& bounds,
                                    double margin);

}  // namespace strn
