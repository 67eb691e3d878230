#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "strn/problem.hpp"

namespace strn {

struct SuiteEntry {
  std::string name;
  Eigen::Index dimension;
  int n_starts;
};

// Ordered, name-unique collection of problems. Registration re-runs the
// Problem invariants and additionally requires any known solution to satisfy
// |F(x*)| <= 1e-10, so a stale solution cannot enter the registry.
class SuiteRegistry {
 public:
  void add(Problem problem);

  // Exact, case-sensitive lookup; UnknownProblem carries near-miss
  // suggestions for the CLI to print.
  const Problem& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  // Rows in registration order; non-empty filter keeps substring matches.
  std::vector<SuiteEntry> list(std::string_view filter = {}) const;

  const std::vector<Problem>& problems() const { return problems_; }
  std::size_t size() const { return problems_.size(); }

 private:
  std::vector<Problem> problems_;
};

// The built-in problems, constructed once. Every problem has an analytic
// Jacobian and expression text for each equation, so all of them can be
// exported to the problem file format.
const SuiteRegistry& builtin_suite();

}  // namespace strn
