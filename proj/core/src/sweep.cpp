#include "strn/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "strn/detail/number_format.hpp"
#include "strn/errors.hpp"

namespace strn {

namespace {

using detail::format_double;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ParameterInfo {
  SweepParameter parameter;
  std::string_view name;
  double SolverParameters::* field;
};

constexpr ParameterInfo kParameters[] = {
    {SweepParameter::Alpha1, "alpha1", &SolverParameters::alpha1},
    {SweepParameter::Alpha2, "alpha2", &SolverParameters::alpha2},
    {SweepParameter::Beta1, "beta1", &SolverParameters::beta1},
    {SweepParameter::Beta2, "beta2", &SolverParameters::beta2},
    {SweepParameter::Beta3, "beta3", &SolverParameters::beta3},
    {SweepParameter::Theta, "theta", &SolverParameters::theta},
    {SweepParameter::Gamma, "gamma", &SolverParameters::gamma},
};

const ParameterInfo& info_for(SweepParameter parameter) {
  for (const auto& info : kParameters)
    if (info.parameter == parameter) return info;
  throw InvalidSweep("unknown sweep parameter enumerator");
}

SolverParameters substitute(const SolverParameters& base, SweepParameter parameter,
                            double value) {
  SolverParameters p = base;
  p.*(info_for(parameter).field) = value;
  return p;
}

}  // namespace

std::string_view sweep_parameter_name(SweepParameter parameter) {
  return info_for(parameter).name;
}

SweepParameter parse_sweep_parameter(std::string_view name) {
  for (const auto& info : kParameters)
    if (info.name == name) return info.parameter;
  std::string known;
  for (const auto& info : kParameters) {
    if (!known.empty()) known += ", ";
    known += info.name;
  }
  throw InvalidSweep("unknown sweep parameter '" + std::string(name) + "' (expected one of " +
                     known + ")");
}

std::vector<double> default_grid(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::Alpha1: return {0.2, 0.3, 0.4, 0.5, 0.6, 0.7};
    case SweepParameter::Alpha2: return {0.3, 0.4, 0.45, 0.5, 0.6, 0.7};
    case SweepParameter::Beta1: return {0.05, 0.1, 0.15, 0.2, 0.25};
    case SweepParameter::Beta2: return {0.1, 0.15, 0.2, 0.25, 0.3, 0.35};
    case SweepParameter::Beta3: return {0.6, 0.7, 0.75, 0.8, 0.85};
    case SweepParameter::Theta: return {0.6, 0.7, 0.8, 0.9, 0.95, 0.99995};
    case SweepParameter::Gamma: return {2, 4, 6, 8, 10};
  }
  throw InvalidSweep("unknown sweep parameter enumerator");
}

SweepSpecification default_sweep(SweepParameter parameter) {
  SweepSpecification spec;
  spec.parameter = parameter;
  spec.values = default_grid(parameter);
  if (parameter == SweepParameter::Alpha1)
    spec.base.alpha2 = *std::max_element(spec.values.begin(), spec.values.end());
  return spec;
}

std::vector<SweepRecord> run_sweep(const SweepSpecification& spec, const SuiteRegistry& registry,
                                   int jobs) {
  if (spec.values.empty()) throw InvalidSweep("sweep grid is empty");
  if (spec.variable_theta && spec.parameter == SweepParameter::Theta)
    throw InvalidSweep("cannot sweep theta while the variable-theta driver overrides it");
  for (const double value : spec.values) {
    try {
      substitute(spec.base, spec.parameter, value).validate();
    } catch (const std::invalid_argument& e) {
      throw InvalidSweep("grid value " + format_double(value) + " for " +
                         std::string(sweep_parameter_name(spec.parameter)) +
                         " violates parameter invariants: " + e.what());
    }
  }

  // Resolve the problem selection, keeping registration order.
  std::vector<const Problem*> problems;
  if (spec.problems.empty()) {
    for (const auto& p : registry.problems()) problems.push_back(&p);
  } else {
    std::set<std::string> wanted;
    for (const auto& name : spec.problems) {
      registry.get(name);  // throws UnknownProblem with suggestions
      wanted.insert(name);
    }
    for (const auto& p : registry.problems())
      if (wanted.count(p.name)) problems.push_back(&p);
  }

  std::vector<int> starts = spec.start_indices;
  std::sort(starts.begin(), starts.end());
  starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
  for (const Problem* problem : problems) {
    const int n_starts = static_cast<int>(problem->starting_points.size());
    for (const int idx : starts)
      if (idx < 0 || idx >= n_starts)
        throw InvalidSweep("start index " + std::to_string(idx) + " is out of range for '" +
                           problem->name + "' (" + std::to_string(n_starts) + " starts)");
  }

  struct Task {
    const Problem* problem;
    int start_index;
    double value;
  };
  std::vector<Task> tasks;
  for (const Problem* problem : problems) {
    std::vector<int> problem_starts = starts;
    if (problem_starts.empty())
      for (int i = 0; i < static_cast<int>(problem->starting_points.size()); ++i)
        problem_starts.push_back(i);
    for (const int start : problem_starts)
      for (const double value : spec.values) tasks.push_back({problem, start, value});
  }

  std::vector<SweepRecord> records(tasks.size());
  const auto run_task = [&](size_t i) {
    const Task& task = tasks[i];
    const SolverParameters params = substitute(spec.base, spec.parameter, task.value);
    const Eigen::VectorXd& x0 = task.problem->starting_points[static_cast<size_t>(task.start_index)];

    const auto t0 = std::chrono::steady_clock::now();
    const SolveReport report = spec.variable_theta
                                   ? solve_with_variable_theta(*task.problem, x0, params, spec.trace)
                                   : solve(*task.problem, x0, params, spec.trace);
    const auto t1 = std::chrono::steady_clock::now();

    SweepRecord& rec = records[i];
    rec.problem = task.problem->name;
    rec.start_index = task.start_index;
    rec.parameter = spec.parameter;
    rec.value = task.value;
    rec.iterations = report.iterations;
    rec.residual_evals = report.residual_evals;
    rec.jacobian_evals = report.jacobian_evals;
    rec.final_residual_norm = report.final_residual_norm;
    rec.termination_code = termination_code(report.reason);
    rec.elapsed_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  };

  size_t workers = jobs > 0 ? static_cast<size_t>(jobs) : std::thread::hardware_concurrency();
  workers = std::clamp<size_t>(workers, 1, tasks.size() == 0 ? 1 : tasks.size());

  if (workers <= 1) {
    for (size_t i = 0; i < tasks.size(); ++i) run_task(i);
  } else {
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const auto worker = [&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const size_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= tasks.size()) return;
        try {
          run_task(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  return records;
}

namespace {

// All records must carry one parameter; returns it (or nullopt when empty).
std::optional<SweepParameter> single_parameter(const std::vector<SweepRecord>& records) {
  if (records.empty()) return std::nullopt;
  const SweepParameter parameter = records.front().parameter;
  for (const auto& rec : records)
    if (rec.parameter != parameter)
      throw MixedSweep("records span multiple swept parameters");
  return parameter;
}

struct PairKey {
  std::string problem;
  int start_index;
  bool operator<(const PairKey& other) const {
    if (problem != other.problem) return problem < other.problem;
    return start_index < other.start_index;
  }
};

// (problem, start) pairs in record order, plus grid values in record order.
struct SweepShape {
  std::vector<PairKey> pairs;                      // first-appearance order
  std::vector<double> values;                      // first-appearance order
  std::map<PairKey, std::vector<const SweepRecord*>> by_pair;  // grid order
};

SweepShape shape_of(const std::vector<SweepRecord>& records) {
  SweepShape shape;
  std::set<PairKey> seen_pairs;
  for (const auto& rec : records) {
    const PairKey key{rec.problem, rec.start_index};
    if (seen_pairs.insert(key).second) shape.pairs.push_back(key);
    auto& row = shape.by_pair[key];
    row.push_back(&rec);
    if (row.size() > shape.values.size()) shape.values.push_back(rec.value);
  }
  return shape;
}

}  // namespace

SensitivityReport sensitivity(const std::vector<SweepRecord>& records) {
  single_parameter(records);
  const SweepShape shape = shape_of(records);

  SensitivityReport report;
  std::map<std::string, bool> problem_sensitive;  // keyed by name; order not used
  for (const auto& key : shape.pairs) {
    const auto& row = shape.by_pair.at(key);
    bool sensitive = false;
    for (const auto* rec : row) {
      if (rec->iterations != row.front()->iterations ||
          rec->termination_code != row.front()->termination_code) {
        sensitive = true;
        break;
      }
    }
    report.pairs.push_back({key.problem, key.start_index, sensitive});
    problem_sensitive[key.problem] = problem_sensitive[key.problem] || sensitive;
  }
  for (const auto& [name, sensitive] : problem_sensitive)
    ++(sensitive ? report.sensitive_problems : report.insensitive_problems);
  return report;
}

namespace {

std::string csv_field(std::string_view value) {
  if (value.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(value);
  std::string quoted = "\"";
  for (const char c : value) {
    quoted += c;
    if (c == '"') quoted += '"';
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void emit_csv(const std::vector<SweepRecord>& records, std::ostream& out, bool zero_elapsed) {
  out << "problem,start_index,parameter,value,iterations,residual_evals,jacobian_evals,"
         "final_residual_norm,termination_code,elapsed_ms\n";
  for (const auto& rec : records) {
    out << csv_field(rec.problem) << ',' << rec.start_index << ','
        << sweep_parameter_name(rec.parameter) << ',' << format_double(rec.value) << ','
        << rec.iterations << ',' << rec.residual_evals << ',' << rec.jacobian_evals << ','
        << format_double(rec.final_residual_norm) << ',' << rec.termination_code << ','
        << (zero_elapsed ? "0" : format_double(rec.elapsed_ms)) << '\n';
  }
}

std::string emit_csv_string(const std::vector<SweepRecord>& records, bool zero_elapsed) {
  std::ostringstream out;
  emit_csv(records, out, zero_elapsed);
  return out.str();
}

std::string emit_iteration_table(const std::vector<SweepRecord>& records,
                                 bool include_insensitive) {
  const auto parameter = single_parameter(records);
  if (!parameter) return "(no records)\n";

  const SweepShape shape = shape_of(records);
  const SensitivityReport sens = sensitivity(records);
  std::set<PairKey> sensitive_pairs;
  for (const auto& pair : sens.pairs)
    if (pair.sensitive) sensitive_pairs.insert({pair.problem, pair.start_index});

  std::string header = "| problem |";
  std::string rule = "| --- |";
  for (const double value : shape.values) {
    header += ' ' + format_double(value) + " |";
    rule += " --- |";
  }

  std::string out = "# iterations by " + std::string(sweep_parameter_name(*parameter)) + "\n";

  std::vector<int> start_indices;
  for (const auto& key : shape.pairs)
    if (std::find(start_indices.begin(), start_indices.end(), key.start_index) ==
        start_indices.end())
      start_indices.push_back(key.start_index);
  std::sort(start_indices.begin(), start_indices.end());

  bool any_rows = false;
  for (const int start : start_indices) {
    std::string block;
    for (const auto& key : shape.pairs) {
      if (key.start_index != start) continue;
      if (!include_insensitive && !sensitive_pairs.count(key)) continue;
      block += "| " + key.problem + " |";
      for (const auto* rec : shape.by_pair.at(key)) {
        block += ' ';
        block += rec->termination_code == 0 ? std::to_string(rec->iterations) : "-";
        block += " |";
      }
      block += '\n';
    }
    if (block.empty()) continue;
    any_rows = true;
    out += "\n## start " + std::to_string(start) + "\n\n" + header + '\n' + rule + '\n' + block;
  }

  if (!any_rows)
    out += "\n" + header + '\n' + rule + '\n' +
           "\n(every pair is insensitive to this parameter; rerun with the include-insensitive "
           "option to list them)\n";
  return out;
}

std::string emit_profile_data(const std::vector<SweepRecord>& records) {
  single_parameter(records);
  const SweepShape shape = shape_of(records);
  const size_t n_pairs = shape.pairs.size();
  const size_t n_values = shape.values.size();

  // ratios[pair][value position]
  std::vector<std::vector<double>> ratios(n_pairs, std::vector<double>(n_values, kInf));
  for (size_t p = 0; p < n_pairs; ++p) {
    const auto& row = shape.by_pair.at(shape.pairs[p]);
    int best = -1;
    for (const auto* rec : row)
      if (rec->termination_code == 0 && (best < 0 || rec->iterations < best))
        best = rec->iterations;
    for (size_t v = 0; v < row.size() && v < n_values; ++v) {
      const SweepRecord& rec = *row[v];
      if (rec.termination_code != 0 || best < 0) continue;
      if (best == 0)
        ratios[p][v] = rec.iterations == 0 ? 1.0 : kInf;
      else
        ratios[p][v] = static_cast<double>(rec.iterations) / best;
    }
  }

  std::string out = "# ratios\n";
  out += "problem\tstart_index";
  for (const double value : shape.values) out += '\t' + format_double(value);
  out += '\n';
  for (size_t p = 0; p < n_pairs; ++p) {
    out += shape.pairs[p].problem + '\t' + std::to_string(shape.pairs[p].start_index);
    for (size_t v = 0; v < n_values; ++v) out += '\t' + format_double(ratios[p][v]);
    out += '\n';
  }

  static constexpr double kTaus[] = {1.0, 1.25, 1.5, 2.0, 4.0, 8.0, kInf};
  out += "# profile\ntau";
  for (const double value : shape.values) out += '\t' + format_double(value);
  out += '\n';
  for (const double tau : kTaus) {
    out += format_double(tau);
    for (size_t v = 0; v < n_values; ++v) {
      size_t within = 0;
      for (size_t p = 0; p < n_pairs; ++p) {
        const double r = ratios[p][v];
        if (std::isinf(tau) ? std::isfinite(r) : r <= tau) ++within;
      }
      out += '\t';
      out += n_pairs == 0 ? "0" : format_double(static_cast<double>(within) /
                                                static_cast<double>(n_pairs));
    }
    out += '\n';
  }
  return out;
}

}  // namespace strn
