#include "cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <string_view>

#include "CLI11.hpp"
#include "json.hpp"
#include "strn/detail/number_format.hpp"
#include "strn/errors.hpp"
#include "strn/problem_file.hpp"
#include "strn/solver.hpp"
#include "strn/suite.hpp"
#include "strn/sweep.hpp"

namespace strn {

namespace {

constexpr int kExitUsage = 64;
constexpr int kExitData = 65;

using detail::format_double;

std::string vector_to_string(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_double(v[i]);
  }
  return out;
}

bool is_problem_file(std::string_view target) {
  return target.size() > 4 && target.substr(target.size() - 4) == ".nls";
}

struct SolveOptions {
  std::string target;
  int start = 0;
  SolverParameters params;
  bool variable_theta = false;
  bool trace = false;
  bool json = false;
};

struct SweepOptions {
  std::string param;
  std::vector<double> values;
  std::vector<std::string> problems;
  std::vector<int> starts;
  std::string out_path;
  bool table = false;
  bool profile = false;
  bool zero_elapsed = false;
  bool include_insensitive = false;
  int jobs = 0;
};

nlohmann::json attempt_to_json(const AttemptSummary& a) {
  return {{"theta", a.theta},
          {"iterations", a.iterations},
          {"residual_evals", a.residual_evals},
          {"jacobian_evals", a.jacobian_evals},
          {"final_residual_norm", a.final_residual_norm},
          {"reason", std::string(termination_name(a.reason))},
          {"termination_code", termination_code(a.reason)}};
}

int run_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  std::optional<Problem> loaded;
  const Problem* problem = nullptr;
  if (is_problem_file(opt.target)) {
    loaded = load_problem_file(opt.target);
    problem = &*loaded;
  } else {
    problem = &builtin_suite().get(opt.target);
  }

  const int n_starts = static_cast<int>(problem->starting_points.size());
  if (opt.start < 0 || opt.start >= n_starts) {
    err << "error: --start " << opt.start << " is out of range ('" << problem->name << "' has "
        << n_starts << " starts)\n";
    return kExitUsage;
  }
  opt.params.validate();  // invalid_argument -> usage error in the dispatcher

  const Eigen::VectorXd& x0 = problem->starting_points[static_cast<size_t>(opt.start)];
  const SolveReport report = opt.variable_theta
                                 ? solve_with_variable_theta(*problem, x0, opt.params, opt.trace)
                                 : solve(*problem, x0, opt.params, opt.trace);
  const int code = termination_code(report.reason);

  if (opt.json) {
    nlohmann::json j{{"problem", problem->name},
                     {"start_index", opt.start},
                     {"reason", std::string(termination_name(report.reason))},
                     {"termination_code", code},
                     {"iterations", report.iterations},
                     {"residual_evals", report.residual_evals},
                     {"jacobian_evals", report.jacobian_evals},
                     {"final_residual_norm", report.final_residual_norm},
                     {"x", std::vector<double>(report.final_x.begin(), report.final_x.end())}};
    j["attempts"] = nlohmann::json::array();
    for (const auto& a : report.attempts) j["attempts"].push_back(attempt_to_json(a));
    if (report.trace) {
      auto trace = nlohmann::json::array();
      for (const auto& rec : *report.trace)
        trace.push_back({{"k", rec.k},
                         {"x", std::vector<double>(rec.x.begin(), rec.x.end())},
                         {"residual_norm", rec.residual_norm},
                         {"delta_before", rec.delta_before},
                         {"delta_after", rec.delta_after},
                         {"step_kind", std::string(step_kind_name(rec.step_kind))},
                         {"rho_cauchy", rec.rho_cauchy},
                         {"rho_actual", rec.rho_actual},
                         {"inner_rejections", rec.inner_rejections},
                         {"scaled_step_norm", rec.scaled_step_norm}});
      j["trace"] = std::move(trace);
    }
    out << j.dump(2) << "\n";
    return code;
  }

  out << "problem: " << problem->name << " (start " << opt.start << ")\n";
  out << "reason: " << termination_name(report.reason) << " (code " << code << ")\n";
  out << "iterations: " << report.iterations << "\n";
  out << "residual evals: " << report.residual_evals << "\n";
  out << "jacobian evals: " << report.jacobian_evals << "\n";
  out << "final residual norm: " << format_double(report.final_residual_norm) << "\n";
  out << "x: " << vector_to_string(report.final_x) << "\n";
  if (report.attempts.size() > 1) {
    out << "attempts:\n";
    for (const auto& a : report.attempts)
      out << "  theta=" << format_double(a.theta) << " iterations=" << a.iterations
          << " reason=" << termination_name(a.reason)
          << " |F|=" << format_double(a.final_residual_norm) << "\n";
  }
  if (report.trace) {
    out << "trace:\n";
    for (const auto& rec : *report.trace)
      out << "  k=" << rec.k << " |F|=" << format_double(rec.residual_norm)
          << " delta=" << format_double(rec.delta_before) << "->"
          << format_double(rec.delta_after) << " kind=" << step_kind_name(rec.step_kind)
          << " rho_c=" << format_double(rec.rho_cauchy)
          << " rho_f=" << format_double(rec.rho_actual)
          << " rejections=" << rec.inner_rejections
          << " step=" << format_double(rec.scaled_step_norm) << "\n";
  }
  return code;
}

int run_sweep_command(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  SweepSpecification spec = default_sweep(parse_sweep_parameter(opt.param));
  if (!opt.values.empty()) spec.values = opt.values;
  spec.problems = opt.problems;
  spec.start_indices = opt.starts;

  const std::vector<SweepRecord> records = run_sweep(spec, builtin_suite(), opt.jobs);

  if (!opt.out_path.empty()) {
    std::ofstream file(opt.out_path, std::ios::binary);
    if (!file) {
      err << "error: cannot open '" << opt.out_path << "' for writing\n";
      return kExitData;
    }
    emit_csv(records, file, opt.zero_elapsed);
    if (!file.good()) {
      err << "error: failed writing '" << opt.out_path << "'\n";
      return kExitData;
    }
  } else if (!opt.table && !opt.profile) {
    emit_csv(records, out, opt.zero_elapsed);
  }
  if (opt.table) out << emit_iteration_table(records, opt.include_insensitive);
  if (opt.profile) out << emit_profile_data(records);
  return 0;
}

int run_list(const std::string& filter, std::ostream& out) {
  for (const auto& row : builtin_suite().list(filter))
    out << row.name << " (n=" << row.dimension << ", starts=" << row.n_starts << ")\n";
  return 0;
}

int run_export(const std::string& name, const std::string& out_path, std::ostream& err) {
  const Problem& problem = builtin_suite().get(name);
  std::ofstream file(out_path, std::ios::binary);
  if (!file) {
    err << "error: cannot open '" << out_path << "' for writing\n";
    return kExitData;
  }
  file << serialize_problem(problem);
  if (!file.good()) {
    err << "error: failed writing '" << out_path << "'\n";
    return kExitData;
  }
  return 0;
}

int run_check(const std::string& path, std::ostream& out) {
  const Problem problem = load_problem_file(path);
  out << "ok: " << problem.name << " (n=" << problem.dimension
      << ", starts=" << problem.starting_points.size()
      << (problem.known_solution ? ", solution given" : "") << ")\n";
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scaled trust-region solver for bound-constrained nonlinear systems"};
  app.name("strn");
  app.require_subcommand(1);

  SolveOptions solve_opt;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "Solve one problem; the exit code is the termination code (0-6)");
  solve_cmd->add_option("target", solve_opt.target, "Built-in problem name or a .nls file")
      ->required();
  solve_cmd->add_option("--start", solve_opt.start, "Starting-point index")
      ->capture_default_str();
  solve_cmd->add_option("--delta0", solve_opt.params.delta0, "Initial trust-region radius")
      ->capture_default_str();
  solve_cmd->add_option("--theta", solve_opt.params.theta, "Boundary truncation factor")
      ->capture_default_str();
  solve_cmd->add_option("--alpha1", solve_opt.params.alpha1, "Radius shrink factor")
      ->capture_default_str();
  solve_cmd->add_option("--alpha2", solve_opt.params.alpha2, "Step-relative shrink factor")
      ->capture_default_str();
  solve_cmd->add_option("--beta1", solve_opt.params.beta1, "Cauchy comparison threshold")
      ->capture_default_str();
  solve_cmd->add_option("--beta2", solve_opt.params.beta2, "Acceptance threshold")
      ->capture_default_str();
  solve_cmd->add_option("--beta3", solve_opt.params.beta3, "Enlargement threshold")
      ->capture_default_str();
  solve_cmd->add_option("--gamma", solve_opt.params.gamma, "Radius enlargement factor")
      ->capture_default_str();
  solve_cmd->add_option("--max-iterations", solve_opt.params.max_iterations, "Iteration budget")
      ->capture_default_str();
  solve_cmd
      ->add_option("--max-evals", solve_opt.params.max_residual_evals,
                   "Residual evaluation budget")
      ->capture_default_str();
  solve_cmd->add_flag("--variable-theta", solve_opt.variable_theta,
                      "Retry over the theta schedule until one attempt converges");
  solve_cmd->add_flag("--trace", solve_opt.trace, "Print per-iteration records");
  solve_cmd->add_flag("--json", solve_opt.json, "Emit the report as JSON");

  SweepOptions sweep_opt;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Vary one parameter over a grid across the suite");
  sweep_cmd->add_option("--param", sweep_opt.param,
                        "Parameter to sweep: alpha1|alpha2|beta1|beta2|beta3|theta|gamma")
      ->required();
  sweep_cmd->add_option("--values", sweep_opt.values, "Grid values (default: stock grid)")
      ->delimiter(',');
  sweep_cmd->add_option("--problems", sweep_opt.problems, "Problem names (default: whole suite)")
      ->delimiter(',');
  sweep_cmd->add_option("--starts", sweep_opt.starts, "Start indices (default: all)")
      ->delimiter(',');
  sweep_cmd->add_option("--out", sweep_opt.out_path, "Write CSV to this file");
  sweep_cmd->add_flag("--table", sweep_opt.table, "Print the markdown iteration table");
  sweep_cmd->add_flag("--profile", sweep_opt.profile, "Print performance-profile data");
  sweep_cmd->add_flag("--zero-elapsed", sweep_opt.zero_elapsed,
                      "Zero the elapsed column for reproducible bytes");
  sweep_cmd->add_flag("--include-insensitive", sweep_opt.include_insensitive,
                      "Keep insensitive rows in the table");
  sweep_cmd->add_option("--jobs", sweep_opt.jobs, "Worker threads (0 = hardware)")
      ->capture_default_str();

  std::string list_filter;
  CLI::App* list_cmd = app.add_subcommand("list", "List built-in problems");
  list_cmd->add_option("filter", list_filter, "Keep names containing this substring");

  std::string export_name, export_path;
  CLI::App* export_cmd =
      app.add_subcommand("export", "Write a built-in problem as a .nls file");
  export_cmd->add_option("problem", export_name, "Built-in problem name")->required();
  export_cmd->add_option("--out", export_path, "Output path")->required();

  std::string check_path;
  CLI::App* check_cmd = app.add_subcommand("check", "Parse and validate a .nls file");
  check_cmd->add_option("file", check_path, "Problem file")->required();

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("strn");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(solve_opt, out, err);
    if (sweep_cmd->parsed()) return run_sweep_command(sweep_opt, out, err);
    if (list_cmd->parsed()) return run_list(list_filter, out);
    if (export_cmd->parsed()) return run_export(export_name, export_path, err);
    if (check_cmd->parsed()) return run_check(check_path, out);
  } catch (const FormatError& e) {
    err << "error: " << e.what();
    if (e.line() > 0) err << " (line " << e.line() << ")";
    err << "\n";
    return kExitData;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << " (line " << e.line() << ", column " << e.column() << ")\n";
    return kExitData;
  } catch (const UnknownProblem& e) {
    err << "error: " << e.what() << "\n";
    if (!e.suggestions().empty()) {
      err << "did you mean:";
      for (const auto& s : e.suggestions()) err << ' ' << s;
      err << "\n";
    }
    return kExitData;
  } catch (const InvalidSweep& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
  err << "error: no subcommand\n";
  return kExitUsage;
}

}  // namespace strn
