#include "strn/suite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "strn/errors.hpp"

namespace strn {

namespace {

constexpr double kSolutionResidualGate = 1e-10;

// Levenshtein distance, small strings only; used for lookup suggestions.
int edit_distance(std::string_view a, std::string_view b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

void SuiteRegistry::add(Problem problem) {
  if (contains(problem.name))
    throw std::invalid_argument("duplicate problem name: " + problem.name);
  if (problem.known_solution) {
    const double norm = problem.residual(*problem.known_solution).norm();
    if (!(norm <= kSolutionResidualGate))
      throw std::invalid_argument("problem '" + problem.name +
                                  "': known solution fails the residual gate");
  }
  problems_.push_back(std::move(problem));
}

const Problem& SuiteRegistry::get(std::string_view name) const {
  for (const auto& p : problems_)
    if (p.name == name) return p;

  std::vector<std::pair<int, std::string>> scored;
  for (const auto& p : problems_) {
    const int d = edit_distance(name, p.name);
    const bool substring = !name.empty() && p.name.find(name) != std::string::npos;
    if (d <= 3 || substring) scored.emplace_back(substring ? 0 : d, p.name);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> suggestions;
  for (const auto& [d, n] : scored) {
    suggestions.push_back(n);
    if (suggestions.size() == 3) break;
  }
  throw UnknownProblem("unknown problem '" + std::string(name) + "'", std::move(suggestions));
}

bool SuiteRegistry::contains(std::string_view name) const {
  return std::any_of(problems_.begin(), problems_.end(),
                     [&](const Problem& p) { return p.name == name; });
}

std::vector<SuiteEntry> SuiteRegistry::list(std::string_view filter) const {
  std::vector<SuiteEntry> rows;
  for (const auto& p : problems_) {
    if (!filter.empty() && p.name.find(filter) == std::string::npos) continue;
    rows.push_back({p.name, p.dimension, static_cast<int>(p.starting_points.size())});
  }
  return rows;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd vec(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (const double value : values) v[i++] = value;
  return v;
}

Problem make_affine_box() {
  MatrixXd a(3, 3);
  a << 4, 1, 0,
       1, 3, -1,
       0, -1, 2;
  const VectorXd b = vec({1.75, -1.25, 2.25});
  return Problem(
      "affine_box",
      [a, b](const VectorXd& x) -> VectorXd { return a * x - b; },
      [a](const VectorXd&) -> MatrixXd { return a; },
      Bounds(vec({-2, -2, -2}), vec({2, 2, 2})),
      {vec({0.8, -0.55, 1.3}), vec({-1.5, 1.5, -1.5})},
      vec({0.5, -0.25, 1.0}),
      {"4*x1 + x2 - 1.75", "x1 + 3*x2 - x3 + 1.25", "-x2 + 2*x3 - 2.25"});
}

VectorXd rosenbrock_residual(const VectorXd& x) {
  return vec({10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]});
}

MatrixXd rosenbrock_jacobian(const VectorXd& x) {
  MatrixXd j(2, 2);
  j << -20.0 * x[0], 10.0,
       -1.0, 0.0;
  return j;
}

const std::vector<std::string> kRosenbrockEquations = {"10*(x2 - x1^2)", "1 - x1"};

Problem make_rosenbrock() {
  return Problem("rosenbrock_system", rosenbrock_residual, rosenbrock_jacobian,
                 Bounds::unbounded(2), {vec({-1.2, 1.0}), vec({2.0, 3.0})}, vec({1.0, 1.0}),
                 kRosenbrockEquations);
}

Problem make_rosenbrock_box() {
  return Problem("rosenbrock_system_box", rosenbrock_residual, rosenbrock_jacobian,
                 Bounds(vec({-2, -2}), vec({2, 2})), {vec({-1.2, 1.0}), vec({1.5, -1.5})},
                 vec({1.0, 1.0}), kRosenbrockEquations);
}

Problem make_brown_almost_linear() {
  static constexpr Eigen::Index n = 5;
  const auto residual = [](const VectorXd& x) -> VectorXd {
    VectorXd f(n);
    const double sum = x.sum();
    for (Eigen::Index i = 0; i + 1 < n; ++i) f[i] = x[i] + sum - (n + 1);
    f[n - 1] = x.prod() - 1.0;
    return f;
  };
  const auto jacobian = [](const VectorXd& x) -> MatrixXd {
    MatrixXd j = MatrixXd::Ones(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) j(i, i) = 2.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      double prod = 1.0;
      for (Eigen::Index k = 0; k < n; ++k)
        if (k != c) prod *= x[k];
      j(n - 1, c) = prod;
    }
    return j;
  };
  return Problem("brown_almost_linear", residual, jacobian,
                 Bounds(VectorXd::Zero(n), VectorXd::Constant(n, 2.0)),
                 {VectorXd::Constant(n, 0.5)}, VectorXd::Ones(n),
                 {"2*x1 + x2 + x3 + x4 + x5 - 6", "x1 + 2*x2 + x3 + x4 + x5 - 6",
                  "x1 + x2 + 2*x3 + x4 + x5 - 6", "x1 + x2 + x3 + 2*x4 + x5 - 6",
                  "x1*x2*x3*x4*x5 - 1"});
}

Problem make_powell_badly_scaled() {
  const auto residual = [](const VectorXd& x) -> VectorXd {
    return vec({1e4 * x[0] * x[1] - 1.0, std::exp(-x[0]) + std::exp(-x[1]) - 1.0001});
  };
  const auto jacobian = [](const VectorXd& x) -> MatrixXd {
    MatrixXd j(2, 2);
    j << 1e4 * x[1], 1e4 * x[0],
         -std::exp(-x[0]), -std::exp(-x[1]);
    return j;
  };
  return Problem("powell_badly_scaled", residual, jacobian,
                 Bounds(vec({0, 0}), vec({1, 100})), {vec({0.1, 1.0}), vec({0.9, 50.0})},
                 vec({1.0981593296998175e-05, 9.106146739866524}),
                 {"10000*x1*x2 - 1", "exp(-x1) + exp(-x2) - 1.0001"});
}

Problem make_boundary_root() {
  const auto residual = [](const VectorXd& x) -> VectorXd {
    return vec({x[0], x[1] - x[0]});
  };
  const auto jacobian = [](const VectorXd&) -> MatrixXd {
    MatrixXd j(2, 2);
    j << 1, 0,
         -1, 1;
    return j;
  };
  return Problem("boundary_root", residual, jacobian, Bounds(vec({0, 0}), vec({1, 1})),
                 {vec({0.5, 0.5}), vec({0.9, 0.1})}, vec({0.0, 0.0}), {"x1", "x2 - x1"});
}

Problem make_chemical_equilibrium_toy() {
  const auto residual = [](const VectorXd& x) -> VectorXd {
    return vec({x[0] * x[0] * x[1] - 1.0, x[0] + x[1] - 2.0});
  };
  const auto jacobian = [](const VectorXd& x) -> MatrixXd {
    MatrixXd j(2, 2);
    j << 2.0 * x[0] * x[1], x[0] * x[0],
         1.0, 1.0;
    return j;
  };
  return Problem("chemical_equilibrium_toy", residual, jacobian,
                 Bounds(vec({0, 0}), vec({5, 5})), {vec({0.5, 1.5}), vec({4.5, 4.8})},
                 vec({1.0, 1.0}), {"x1^2*x2 - 1", "x1 + x2 - 2"});
}

Problem make_singular_jacobian_case() {
  const auto residual = [](const VectorXd& x) -> VectorXd {
    return vec({x[0] * x[0], x[0] * x[1]});
  };
  const auto jacobian = [](const VectorXd& x) -> MatrixXd {
    MatrixXd j(2, 2);
    j << 2.0 * x[0], 0.0,
         x[1], x[0];
    return j;
  };
  return Problem("singular_jacobian_case", residual, jacobian,
                 Bounds(vec({-1, -1}), vec({1, 1})), {vec({0.5, 0.5})}, vec({0.0, 0.0}),
                 {"x1^2", "x1*x2"});
}

Problem make_himmelblau_system() {
  const auto residual = [](const VectorXd& x) -> VectorXd {
    const double a = x[0], b = x[1];
    return vec({4 * a * a * a + 4 * a * b - 42 * a + 2 * b * b - 14,
                2 * a * a + 4 * b * b * b + 4 * a * b - 26 * b - 22});
  };
  const auto jacobian = [](const VectorXd& x) -> MatrixXd {
    const double a = x[0], b = x[1];
    MatrixXd j(2, 2);
    j << 12 * a * a + 4 * b - 42, 4 * a + 4 * b,
         4 * a + 4 * b, 12 * b * b + 4 * a - 26;
    return j;
  };
  return Problem("himmelblau_system", residual, jacobian, Bounds(vec({-5, -5}), vec({5, 5})),
                 {vec({1.0, 1.0}), vec({-2.0, 2.0}), vec({-4.0, -3.0}), vec({3.5, -1.5})},
                 vec({3.0, 2.0}),
                 {"4*x1^3 + 4*x1*x2 - 42*x1 + 2*x2^2 - 14",
                  "2*x1^2 + 4*x2^3 + 4*x1*x2 - 26*x2 - 22"});
}

}  // namespace

const SuiteRegistry& builtin_suite() {
  static const SuiteRegistry registry = [] {
    SuiteRegistry r;
    r.add(make_affine_box());
    r.add(make_rosenbrock());
    r.add(make_rosenbrock_box());
    r.add(make_brown_almost_linear());
    r.add(make_powell_badly_scaled());
    r.add(make_boundary_root());
    r.add(make_chemical_equilibrium_toy());
    r.add(make_singular_jacobian_case());
    r.add(make_himmelblau_system());
    return r;
  }();
  return registry;
}

}  // namespace strn
