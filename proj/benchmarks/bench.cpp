#include <benchmark/benchmark.h>

#include <random>

#include "strn/expr.hpp"
#include "strn/problem.hpp"
#include "strn/problem_file.hpp"
#include "strn/scaling.hpp"
#include "strn/solver.hpp"
#include "strn/suite.hpp"
#include "strn/trial_step.hpp"

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void BM_SolveRosenbrock(benchmark::State& state) {
  const strn::Problem& problem = strn::builtin_suite().get("rosenbrock_system");
  const VectorXd& x0 = problem.starting_points.front();
  for (auto _ : state) {
    const strn::SolveReport report = strn::solve(problem, x0);
    benchmark::DoNotOptimize(report.final_residual_norm);
  }
}
BENCHMARK(BM_SolveRosenbrock);

void BM_DoglegStep(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  std::mt19937 rng(42);
  std::normal_distribution<double> gauss;
  MatrixXd j = MatrixXd::Identity(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) j(r, c) += 0.3 * gauss(rng);
  VectorXd f(n);
  for (Eigen::Index i = 0; i < n; ++i) f[i] = gauss(rng);

  strn::ModelContext ctx{0.5 * f.squaredNorm(), j.transpose() * f, j, f};
  const strn::Bounds bounds = strn::Bounds::unbounded(n);
  const strn::ScalingDiagonal scaling =
      strn::compute_scaling(VectorXd::Zero(n), ctx.grad, bounds);
  const auto newton = strn::newton_step(ctx);

  for (auto _ : state) {
    const strn::TrialStep step = strn::dogleg_step(ctx, scaling, newton, 0.1);
    benchmark::DoNotOptimize(step.scaled_norm);
  }
}
BENCHMARK(BM_DoglegStep)->Arg(4)->Arg(16)->Arg(64);

void BM_ExpressionEval(benchmark::State& state) {
  const strn::dsl::ExprPtr expr = strn::dsl::parse_expression(
      "exp(-x1) + 10*(x2 - x1^2)^2 + sin(x1*x2) / (1 + x2^2)", 2);
  const double x[2] = {0.7, -1.3};
  for (auto _ : state) benchmark::DoNotOptimize(expr->evaluate(x));
}
BENCHMARK(BM_ExpressionEval);

void BM_FDJacobian(benchmark::State& state) {
  const strn::Problem& problem = strn::builtin_suite().get("brown_almost_linear");
  const VectorXd& x0 = problem.starting_points.front();
  const VectorXd f0 = problem.residual(x0);
  strn::EvalCounter counter;
  for (auto _ : state) {
    const MatrixXd j = strn::finite_difference_jacobian(problem, x0, f0, counter);
    benchmark::DoNotOptimize(j(0, 0));
  }
}
BENCHMARK(BM_FDJacobian);

void BM_ParseProblemFile(benchmark::State& state) {
  const std::string text =
      strn::serialize_problem(strn::builtin_suite().get("himmelblau_system"));
  for (auto _ : state) {
    const strn::Problem problem = strn::parse_problem_file(text);
    benchmark::DoNotOptimize(problem.dimension);
  }
}
BENCHMARK(BM_ParseProblemFile);

}  // namespace

BENCHMARK_MAIN();
