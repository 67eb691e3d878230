#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "strn/solver.hpp"
#include "strn/suite.hpp"

namespace strn {

enum class SweepParameter { Alpha1, Alpha2, Beta1, Beta2, Beta3, Theta, Gamma };

std::string_view sweep_parameter_name(SweepParameter parameter);

// Inverse of sweep_parameter_name; throws InvalidSweep for unknown names.
SweepParameter parse_sweep_parameter(std::string_view name);

// The stock grid for each parameter. The alpha1/alpha2/beta1/beta3/theta
// grids are the tuning grids this solver family is conventionally studied
// over; the beta2 and gamma grids bracket their default values, since no
// conventional grid exists for those two.
std::vector<double> default_grid(SweepParameter parameter);

struct SweepSpecification {
  SweepParameter parameter = SweepParameter::Theta;
  std::vector<double> values;         // ordered grid, substituted one at a time
  std::vector<std::string> problems;  // empty = whole registry
  std::vector<int> start_indices;     // empty = every start of each problem
  SolverParameters base;
  bool variable_theta = false;  // run the restart driver instead of one solve
  bool trace = false;           // solves record traces (results are identical)
};

// Grid = default_grid(parameter), everything else default. Sweeping alpha1
// raises the base alpha2 to the top of that grid so every substitution keeps
// alpha1 <= alpha2 valid.
SweepSpecification default_sweep(SweepParameter parameter);

struct SweepRecord {
  std::string problem;
  int start_index = 0;
  SweepParameter parameter = SweepParameter::Theta;
  double value = 0.0;
  int iterations = 0;
  long residual_evals = 0;
  long jacobian_evals = 0;
  double final_residual_norm = 0.0;
  int termination_code = 0;
  double elapsed_ms = 0.0;
};

// One record per (problem, start, value), ordered by (problem registration
// order, start_index, grid position). Failed solves produce records with
// their termination code; only invalid specifications throw (InvalidSweep,
// UnknownProblem), before any run starts. jobs = 0 uses one worker per
// hardware thread; the records are identical for any worker count.
std::vector<SweepRecord> run_sweep(const SweepSpecification& spec, const SuiteRegistry& registry,
                                   int jobs = 0);

struct PairSensitivity {
  std::string problem;
  int start_index = 0;
  bool sensitive = false;
};

// A pair is sensitive when its iteration counts or termination codes differ
// anywhere across the grid; a problem counts as sensitive when any of its
// starts is.
struct SensitivityReport {
  std::vector<PairSensitivity> pairs;
  int sensitive_problems = 0;
  int insensitive_problems = 0;
};

// Throws MixedSweep when the records span more than one swept parameter.
SensitivityReport sensitivity(const std::vector<SweepRecord>& records);

// CSV: fixed header, RFC-4180 quoting, shortest round-trip floats. With
// zero_elapsed the elapsed column is all 0, making output byte-reproducible.
void emit_csv(const std::vector<SweepRecord>& records, std::ostream& out,
              bool zero_elapsed = false);
std::string emit_csv_string(const std::vector<SweepRecord>& records, bool zero_elapsed = false);

// Markdown tables, one block per start index: problems as rows, grid values
// as columns, iteration counts in cells, "-" for non-converged runs. Only
// sensitive rows appear unless include_insensitive is set; when nothing
// qualifies the output is a header-only table plus a note saying so.
std::string emit_iteration_table(const std::vector<SweepRecord>& records,
                                 bool include_insensitive = false);

// Tab-separated performance-profile data: per-pair ratios r = iterations /
// best-iterations-over-grid (inf for non-converged runs), then the cumulative
// profile rho(tau) per grid value at tau in {1, 1.25, 1.5, 2, 4, 8, inf};
// rho(inf) is the converged fraction.
std::string emit_profile_data(const std::vector<SweepRecord>& records);

}  // namespace strn
