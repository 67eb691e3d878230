#include "strn/problem.hpp"

#include <cmath>
#include <stdexcept>

#include "strn/errors.hpp"

namespace strn {

Problem::Problem(std::string name_, ResidualFn residual_, JacobianFn jacobian_, Bounds bounds_,
                 std::vector<Eigen::VectorXd> starting_points_,
                 std::optional<Eigen::VectorXd> known_solution_,
                 std::vector<std::string> equations_)
    : name(std::move(name_)),
      dimension(bounds_.size()),
      residual(std::move(residual_)),
      jacobian(std::move(jacobian_)),
      bounds(std::move(bounds_)),
      starting_points(std::move(starting_points_)),
      known_solution(std::move(known_solution_)),
      equations(std::move(equations_)) {
  if (dimension <= 0) throw std::invalid_argument("problem: dimension must be positive");
  if (!residual) throw std::invalid_argument("problem: residual evaluator is required");
  for (const auto& s : starting_points) {
    if (s.size() != dimension)
      throw std::invalid_argument("problem '" + name + "': starting point has wrong dimension");
    if (!bounds.strictly_inside(s))
      throw std::invalid_argument("problem '" + name +
                                  "': starting point is not strictly inside the box");
  }
  if (known_solution && known_solution->size() != dimension)
    throw std::invalid_argument("problem '" + name + "': known solution has wrong dimension");
  if (!equations.empty() && static_cast<Eigen::Index>(equations.size()) != dimension)
    throw std::invalid_argument("problem '" + name + "': equation count != dimension");
}

Eigen::VectorXd evaluate_residual(const Problem& problem, const Eigen::VectorXd& x,
                                  EvalCounter& counter) {
  if (x.size() != problem.dimension)
    throw std::invalid_argument("evaluate_residual: point has wrong dimension");
  ++counter.residual_evals;
  Eigen::VectorXd r = problem.residual(x);
  if (r.size() != problem.dimension)
    throw std::invalid_argument("evaluate_residual: evaluator returned wrong dimension");
  if (!r.allFinite())
    throw NonFiniteEvaluation("residual of '" + problem.name +
                              "' is not finite at the requested point");
  return r;
}

double merit_value(const Eigen::VectorXd& residual) { return 0.5 * residual.squaredNorm(); }

double evaluate_merit(const Problem& problem, const Eigen::VectorXd& x, EvalCounter& counter) {
  return merit_value(evaluate_residual(problem, x, counter));
}

Eigen::MatrixXd evaluate_jacobian(const Problem& problem, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& residual_at_x, EvalCounter& counter) {
  if (problem.jacobian) {
    ++counter.jacobian_evals;
    Eigen::MatrixXd j = problem.jacobian(x);
    if (j.rows() != problem.dimension || j.cols() != problem.dimension)
      throw std::invalid_argument("evaluate_jacobian: evaluator returned wrong shape");
    if (!j.allFinite())
      throw NonFiniteEvaluation("jacobian of '" + problem.name +
                                "' is not finite at the requested point");
    return j;
  }
  return finite_difference_jacobian(problem, x, residual_at_x, counter);
}

Eigen::MatrixXd finite_difference_jacobian(const Problem& problem, const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& residual_at_x,
                                           EvalCounter& counter) {
  const Eigen::Index n = problem.dimension;
  const double sqrt_eps = std::sqrt(std::numeric_limits<double>::epsilon());
  Eigen::MatrixXd j(n, n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index col = 0; col < n; ++col) {
    double h = sqrt_eps * std::max(std::abs(x[col]), 1.0);
    if (x[col] + h >= problem.bounds.upper()[col]) h = -h;
    xp[col] = x[col] + h;
    const Eigen::VectorXd shifted = evaluate_residual(problem, xp, counter);
    j.col(col) = (shifted - residual_at_x) / h;
    xp[col] = x[col];
  }
  return j;
}

}  // namespace strn
