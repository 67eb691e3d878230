#include <doctest.h>

#include <Eigen/Core>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "strn/errors.hpp"
#include "strn/solver.hpp"
#include "strn/suite.hpp"

using strn::Bounds;
using strn::Problem;
using strn::SolveReport;
using strn::SolverParameters;
using strn::TerminationReason;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd vec1(double a) { return Eigen::VectorXd::Constant(1, a); }

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Problem scalar_problem(const char* name, std::function<double(double)> f,
                       std::function<double(double)> df,
                       Bounds bounds = Bounds::unbounded(1)) {
  strn::JacobianFn jac;  // empty when df is absent -> finite differences
  if (df)
    jac = [df](const Eigen::VectorXd& x) { return Eigen::MatrixXd::Constant(1, 1, df(x(0))); };
  return Problem(
      name, [f](const Eigen::VectorXd& x) { return vec1(f(x(0))); }, std::move(jac),
      std::move(bounds));
}

}  // namespace

TEST_CASE("parameter invariants are validated") {
  CHECK_NOTHROW(SolverParameters{}.validate());

  auto reject = [](auto mutate) {
    SolverParameters p;
    mutate(p);
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  };
  reject([](SolverParameters& p) { p.delta0 = 0.0; });
  reject([](SolverParameters& p) { p.delta0 = -1.0; });
  reject([](SolverParameters& p) { p.theta = 0.0; });
  reject([](SolverParameters& p) { p.theta = 1.0; });
  reject([](SolverParameters& p) { p.alpha1 = 0.0; });
  reject([](SolverParameters& p) { p.alpha1 = 0.6; });  // above alpha2 = 0.5
  reject([](SolverParameters& p) { p.alpha2 = 1.0; });
  reject([](SolverParameters& p) { p.beta1 = 0.0; });
  reject([](SolverParameters& p) { p.beta1 = 1.5; });
  reject([](SolverParameters& p) { p.beta2 = 0.0; });
  reject([](SolverParameters& p) { p.beta2 = 0.75; });  // must stay below beta3
  reject([](SolverParameters& p) { p.beta3 = 1.0; });
  reject([](SolverParameters& p) { p.gamma = 1.0; });
  reject([](SolverParameters& p) { p.max_iterations = 0; });
  reject([](SolverParameters& p) { p.max_residual_evals = 0; });

  // Equal shrink factors are allowed: 0 < alpha1 <= alpha2 < 1.
  SolverParameters eq;
  eq.alpha1 = eq.alpha2 = 0.4;
  CHECK_NOTHROW(eq.validate());
  // beta1 may reach 1.
  SolverParameters b1;
  b1.beta1 = 1.0;
  CHECK_NOTHROW(b1.validate());
}

TEST_CASE("termination reasons map to stable codes and names") {
  using TR = TerminationReason;
  CHECK(strn::termination_code(TR::Converged) == 0);
  CHECK(strn::termination_code(TR::MaxIterations) == 1);
  CHECK(strn::termination_code(TR::MaxEvaluations) == 2);
  CHECK(strn::termination_code(TR::TrustRegionTooSmall) == 3);
  CHECK(strn::termination_code(TR::StagnatedResidual) == 4);
  CHECK(strn::termination_code(TR::SmallScaledGradient) == 5);
  CHECK(strn::termination_code(TR::ScalingFailure) == 6);

  CHECK(strn::termination_name(TR::Converged) == "converged");
  CHECK(strn::termination_name(TR::MaxIterations) == "max_iterations");
  CHECK(strn::termination_name(TR::MaxEvaluations) == "max_evaluations");
  CHECK(strn::termination_name(TR::TrustRegionTooSmall) == "trust_region_too_small");
  CHECK(strn::termination_name(TR::StagnatedResidual) == "stagnated_residual");
  CHECK(strn::termination_name(TR::SmallScaledGradient) == "small_scaled_gradient");
  CHECK(strn::termination_name(TR::ScalingFailure) == "scaling_failure");

  CHECK(strn::is_converged(TR::Converged));
  CHECK_FALSE(strn::is_converged(TR::MaxIterations));
  CHECK_FALSE(strn::is_converged(TR::ScalingFailure));
}

TEST_CASE("a linear system converges in one Newton step") {
  const Problem& p = strn::builtin_suite().get("affine_box");
  const SolveReport report = strn::solve(p, p.starting_points[0], {}, true);

  CHECK(report.reason == TerminationReason::Converged);
  CHECK(report.iterations == 1);
  CHECK(report.residual_evals == 2);
  CHECK(report.jacobian_evals == 1);
  CHECK(report.final_residual_norm <= 1e-10);
  REQUIRE(report.trace.has_value());
  REQUIRE(report.trace->size() == 1);
  CHECK(report.trace->front().step_kind == strn::StepKind::NewtonInterior);
  CHECK(report.trace->front().inner_rejections == 0);
  CHECK(report.trace->front().delta_before == 1.0);
  CHECK(report.attempts.size() == 1);
  CHECK(report.attempts.front().theta == SolverParameters{}.theta);
}

TEST_CASE("starting points must be strictly interior") {
  const Problem& p = strn::builtin_suite().get("rosenbrock_system_box");
  CHECK_THROWS_AS(strn::solve(p, vec2(2.0, 2.0), {}), strn::InvalidStartingPoint);
  CHECK_THROWS_AS(strn::solve(p, vec2(0.0, 5.0), {}), strn::InvalidStartingPoint);
  CHECK_THROWS_AS(strn::solve(p, vec2(-2.0, 0.0), {}), strn::InvalidStartingPoint);
}

TEST_CASE("a non-finite residual at the start propagates") {
  const Problem p = scalar_problem(
      "nan_everywhere", [](double) { return kNaN; }, [](double) { return 1.0; });
  CHECK_THROWS_AS(strn::solve(p, vec1(0.0), {}), strn::NonFiniteEvaluation);
}

TEST_CASE("invalid parameters are rejected before any evaluation") {
  const Problem& p = strn::builtin_suite().get("rosenbrock_system");
  SolverParameters bad;
  bad.theta = 0.0;
  CHECK_THROWS_AS(strn::solve(p, p.starting_points[0], bad), std::invalid_argument);
  bad = SolverParameters{};
  bad.gamma = 1.0;
  CHECK_THROWS_AS(strn::solve_with_variable_theta(p, p.starting_points[0], bad),
                  std::invalid_argument);
}

TEST_CASE("termination: residual stagnates on a rootless well") {
  // F(x) = 1 + (x - c)^2 has no root; the merit minimum at x = c keeps
  // ||F|| ~ 1 while successive residuals become indistinguishable.
  const double c = 2.337;
  const Problem p = scalar_problem(
      "well", [c](double x) { return 1.0 + (x - c) * (x - c); },
      [c](double x) { return 2.0 * (x - c); });
  const SolveReport report = strn::solve(p, vec1(5.1), {});
  CHECK(report.reason == TerminationReason::StagnatedResidual);
  CHECK(report.final_residual_norm >= 1.0);
  CHECK(report.final_residual_norm <= 1.0 + 1e-6);
}

TEST_CASE("termination: vanishing scaled gradient at a merit minimum") {
  // x^2 + 1 from x0 = 1: the first Newton step lands exactly on x = 0 where
  // the gradient J^T F vanishes.
  const Problem p = scalar_problem(
      "rootless", [](double x) { return x * x + 1.0; }, [](double x) { return 2.0 * x; });
  const SolveReport report = strn::solve(p, vec1(1.0), {});
  CHECK(report.reason == TerminationReason::SmallScaledGradient);
  CHECK(report.iterations == 1);
  CHECK(report.final_x(0) == 0.0);
  CHECK(report.final_residual_norm == 1.0);
}

TEST_CASE("termination: the radius collapses when every trial fails") {
  // Finite only at the start: every trial point rejects, the radius halves
  // away, and no iteration is ever accepted.
  const Problem p = scalar_problem(
      "spike", [](double x) { return x == 0.25 ? 0.5 : kNaN; }, [](double) { return 1.0; });
  const SolveReport report = strn::solve(p, vec1(0.25), {}, true);
  CHECK(report.reason == TerminationReason::TrustRegionTooSmall);
  CHECK(report.iterations == 0);
  REQUIRE(report.trace.has_value());
  CHECK(report.trace->empty());
  CHECK(report.final_x(0) == 0.25);
}

TEST_CASE("termination: evaluation budget") {
  Problem fd = strn::builtin_suite().get("rosenbrock_system");
  fd.jacobian = nullptr;

  SolverParameters tight;
  tight.max_residual_evals = 1;
  const SolveReport at_entry = strn::solve(fd, fd.starting_points[0], tight);
  CHECK(at_entry.reason == TerminationReason::MaxEvaluations);
  CHECK(at_entry.iterations == 0);
  CHECK(at_entry.residual_evals == 1);
  CHECK(at_entry.jacobian_evals == 0);

  // Budget runs out inside the rejection loop.
  const Problem spike = scalar_problem(
      "spike", [](double x) { return x == 0.25 ? 0.5 : kNaN; }, [](double) { return 1.0; });
  SolverParameters five;
  five.max_residual_evals = 5;
  five.min_delta = 1e-30;
  const SolveReport mid = strn::solve(spike, vec1(0.25), five);
  CHECK(mid.reason == TerminationReason::MaxEvaluations);
  CHECK(mid.residual_evals == 5);
  CHECK(mid.iterations == 0);

  // Convergence is checked before the budget: a solve that finds the root on
  // its last allowed evaluation still reports success.
  const Problem line = scalar_problem(
      "line", [](double x) { return x - 3.0; }, nullptr);
  SolverParameters two;
  two.max_residual_evals = 2;
  two.delta0 = 4.0;  // room for the full Newton step straight to the root
  const SolveReport won = strn::solve(line, vec1(0.0), two);
  CHECK(won.reason == TerminationReason::Converged);
  CHECK(won.residual_evals == 3);  // initial + difference column + accepted trial
}

TEST_CASE("termination: iteration budget") {
  const Problem& p = strn::builtin_suite().get("rosenbrock_system");
  SolverParameters two;
  two.max_iterations = 2;
  const SolveReport report = strn::solve(p, p.starting_points[0], two);
  CHECK(report.reason == TerminationReason::MaxIterations);
  CHECK(report.iterations == 2);
}

TEST_CASE("termination: scaling failure next to a bound") {
  const Problem p = scalar_problem(
      "hugging", [](double x) { return x + 0.5; }, [](double) { return 1.0; },
      Bounds(vec1(0.0), vec1(1.0)));
  const SolveReport report = strn::solve(p, vec1(1e-301), {});
  CHECK(report.reason == TerminationReason::ScalingFailure);
  CHECK(report.iterations == 0);
}

TEST_CASE("trace records chain radii and account for every evaluation") {
  const Problem& p = strn::builtin_suite().get("rosenbrock_system");
  const SolverParameters params;
  const SolveReport report = strn::solve(p, p.starting_points[0], params, true);
  CHECK(report.reason == TerminationReason::Converged);
  REQUIRE(report.trace.has_value());
  const auto& trace = *report.trace;
  REQUIRE(static_cast<int>(trace.size()) == report.iterations);

  long trials = 0;
  double prev_norm = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < trace.size(); ++j) {
    const strn::IterationRecord& rec = trace[j];
    CHECK(rec.k == static_cast<int>(j));
    CHECK(rec.residual_norm < prev_norm);
    prev_norm = rec.residual_norm;
    CHECK(rec.rho_actual >= params.beta2);
    CHECK(rec.inner_rejections >= 0);
    CHECK(rec.scaled_step_norm > 0.0);
    if (j == 0)
      CHECK(rec.delta_before == params.delta0);
    else
      CHECK(rec.delta_before == trace[j - 1].delta_after);
    trials += 1 + rec.inner_rejections;
  }
  CHECK(report.residual_evals == 1 + trials);
  CHECK(report.jacobian_evals == report.iterations);
}

TEST_CASE("solves are deterministic") {
  const Problem& p = strn::builtin_suite().get("powell_badly_scaled");
  const SolveReport a = strn::solve(p, p.starting_points[0], {}, true);
  const SolveReport b = strn::solve(p, p.starting_points[0], {}, true);
  CHECK((a.final_x.array() == b.final_x.array()).all());
  CHECK(a.final_residual_norm == b.final_residual_norm);
  CHECK(a.iterations == b.iterations);
  CHECK(a.residual_evals == b.residual_evals);
  REQUIRE(a.trace->size() == b.trace->size());
  for (std::size_t j = 0; j < a.trace->size(); ++j) {
    CHECK(((*a.trace)[j].x.array() == (*b.trace)[j].x.array()).all());
    CHECK((*a.trace)[j].delta_after == (*b.trace)[j].delta_after);
  }
}

TEST_CASE("iterates stay strictly inside the box") {
  const Problem& p = strn::builtin_suite().get("rosenbrock_system_box");
  const SolveReport report = strn::solve(p, p.starting_points[0], {}, true);
  CHECK(report.reason == TerminationReason::Converged);
  for (const auto& rec : *report.trace) CHECK(p.bounds.strictly_inside(rec.x));
  CHECK(p.bounds.strictly_inside(report.final_x));
}

TEST_CASE("reported evaluation counts match the evaluators' own tallies") {
  const Problem& base = strn::builtin_suite().get("powell_badly_scaled");
  long res_calls = 0;
  long jac_calls = 0;
  Problem counted = base;
  counted.residual = [&base, &res_calls](const Eigen::VectorXd& x) {
    ++res_calls;
    return base.residual(x);
  };
  counted.jacobian = [&base, &jac_calls](const Eigen::VectorXd& x) {
    ++jac_calls;
    return base.jacobian(x);
  };
  const SolveReport report = strn::solve(counted, base.starting_points[0], {});
  CHECK(report.residual_evals == res_calls);
  CHECK(report.jacobian_evals == jac_calls);
}

TEST_CASE("the theta schedule is 13 capped steps of 0.025") {
  const std::vector<double> schedule = strn::variable_theta_schedule();
  REQUIRE(schedule.size() == 13);
  CHECK(schedule.front() == 0.7);
  CHECK(schedule[1] == doctest::Approx(0.725).epsilon(1e-15));
  CHECK(schedule.back() == 0.99995);
  for (std::size_t i = 1; i < schedule.size(); ++i) CHECK(schedule[i] > schedule[i - 1]);
}

TEST_CASE("variable theta returns immediately on a converging first attempt") {
  const Problem& p = strn::builtin_suite().get("rosenbrock_system");
  const SolveReport report = strn::solve_with_variable_theta(p, p.starting_points[0], {});
  CHECK(report.reason == TerminationReason::Converged);
  REQUIRE(report.attempts.size() == 1);
  CHECK(report.attempts.front().theta == 0.7);
  CHECK(report.residual_evals == report.attempts.front().residual_evals);
}

TEST_CASE("variable theta walks the schedule until an attempt converges") {
  const Problem& p = strn::builtin_suite().get("boundary_root");
  SolverParameters tight;
  tight.max_iterations = 4;
  const SolveReport report =
      strn::solve_with_variable_theta(p, p.starting_points[0], tight);

  CHECK(report.reason == TerminationReason::Converged);
  REQUIRE(report.attempts.size() >= 2);
  const std::vector<double> schedule = strn::variable_theta_schedule();
  long res_total = 0;
  long jac_total = 0;
  for (std::size_t j = 0; j < report.attempts.size(); ++j) {
    const strn::AttemptSummary& a = report.attempts[j];
    CHECK(a.theta == schedule[j]);
    if (j + 1 < report.attempts.size())
      CHECK(a.reason == TerminationReason::MaxIterations);
    else
      CHECK(a.reason == TerminationReason::Converged);
    res_total += a.residual_evals;
    jac_total += a.jacobian_evals;
  }
  CHECK(report.residual_evals == res_total);
  CHECK(report.jacobian_evals == jac_total);
  CHECK(report.iterations == report.attempts.back().iterations);
  CHECK(report.iterations <= 4);
}

TEST_CASE("variable theta exhausts the schedule on a rootless problem") {
  const Problem p = scalar_problem(
      "rootless", [](double x) { return x * x + 1.0; }, [](double x) { return 2.0 * x; });
  const SolveReport report = strn::solve_with_variable_theta(p, vec1(1.0), {});

  REQUIRE(report.attempts.size() == 13);
  CHECK(report.reason != TerminationReason::Converged);
  CHECK(report.final_residual_norm == 1.0);
  long res_total = 0;
  for (const auto& a : report.attempts) {
    CHECK(a.reason == TerminationReason::SmallScaledGradient);
    CHECK(a.final_residual_norm >= 1.0);
    res_total += a.residual_evals;
  }
  CHECK(report.residual_evals == res_total);
}
