#include "strn/problem_file.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "strn/detail/number_format.hpp"
#include "strn/errors.hpp"
#include "strn/expr.hpp"

namespace strn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

double parse_value(std::string_view token, bool allow_infinite, int line) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc{} || end != token.data() + token.size())
    throw FormatError("malformed number '" + std::string(token) + "'", line);
  if (std::isnan(v)) throw FormatError("'nan' is not a valid value", line);
  if (!allow_infinite && !std::isfinite(v))
    throw FormatError("infinite values are only allowed in 'lower' and 'upper' lines", line);
  return v;
}

Eigen::VectorXd parse_values(std::string_view rest, Eigen::Index n, bool allow_infinite,
                             int line) {
  const auto tokens = split_tokens(rest);
  if (static_cast<Eigen::Index>(tokens.size()) != n)
    throw FormatError("expected " + std::to_string(n) + " values, found " +
                          std::to_string(tokens.size()),
                      line);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i)
    out[i] = parse_value(tokens[static_cast<size_t>(i)], allow_infinite, line);
  return out;
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (const char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

Problem parse_problem_file(std::string_view text) {
  std::string name;
  int name_line = 0;
  Eigen::Index n = -1;
  std::vector<std::string> equations;
  std::vector<dsl::ExprPtr> asts;
  std::optional<Eigen::VectorXd> lower, upper;
  int lower_line = 0, upper_line = 0;
  std::vector<std::pair<Eigen::VectorXd, int>> starts;
  std::optional<Eigen::VectorXd> solution;

  const auto require_vars = [&](std::string_view keyword, int line) {
    if (n < 0)
      throw FormatError("'vars' must appear before '" + std::string(keyword) + "'", line);
  };

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    const size_t eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const size_t hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    size_t kw_end = 0;
    while (kw_end < line.size() && line[kw_end] != ' ' && line[kw_end] != '\t') ++kw_end;
    const std::string_view keyword = line.substr(0, kw_end);
    const std::string_view rest = trim(line.substr(kw_end));

    if (keyword == "name") {
      if (name_line != 0) throw FormatError("duplicate 'name' line", line_no);
      if (!valid_name(rest))
        throw FormatError("problem name must be a single token of [A-Za-z0-9_.-]", line_no);
      name = std::string(rest);
      name_line = line_no;
    } else if (keyword == "vars") {
      if (n >= 0) throw FormatError("duplicate 'vars' line", line_no);
      long value = 0;
      const auto [end, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
      if (ec != std::errc{} || end != rest.data() + rest.size() || value < 1)
        throw FormatError("'vars' needs a positive integer", line_no);
      n = static_cast<Eigen::Index>(value);
    } else if (keyword == "eq") {
      require_vars(keyword, line_no);
      if (static_cast<Eigen::Index>(equations.size()) == n)
        throw FormatError("too many 'eq' lines (expected " + std::to_string(n) + ")", line_no);
      try {
        asts.push_back(dsl::parse_expression(rest, static_cast<int>(n)));
      } catch (const ParseError& e) {
        throw FormatError(std::string(e.what()) + " (column " + std::to_string(e.column()) + ")",
                          line_no);
      }
      equations.emplace_back(rest);
    } else if (keyword == "lower" || keyword == "upper") {
      require_vars(keyword, line_no);
      auto& slot = keyword == "lower" ? lower : upper;
      if (slot) throw FormatError("duplicate '" + std::string(keyword) + "' line", line_no);
      slot = parse_values(rest, n, /*allow_infinite=*/true, line_no);
      (keyword == "lower" ? lower_line : upper_line) = line_no;
    } else if (keyword == "start") {
      require_vars(keyword, line_no);
      starts.emplace_back(parse_values(rest, n, /*allow_infinite=*/false, line_no), line_no);
    } else if (keyword == "solution") {
      require_vars(keyword, line_no);
      if (solution) throw FormatError("duplicate 'solution' line", line_no);
      solution = parse_values(rest, n, /*allow_infinite=*/false, line_no);
    } else {
      throw FormatError("unknown directive '" + std::string(keyword) + "'", line_no);
    }
  }

  if (name_line == 0) throw FormatError("missing 'name' line", 0);
  if (n < 0) throw FormatError("missing 'vars' line", 0);
  if (static_cast<Eigen::Index>(equations.size()) != n)
    throw FormatError("expected " + std::to_string(n) + " 'eq' lines, found " +
                          std::to_string(equations.size()),
                      0);
  if (!lower) throw FormatError("missing 'lower' line", 0);
  if (!upper) throw FormatError("missing 'upper' line", 0);
  if (starts.empty()) throw FormatError("missing 'start' line", 0);

  std::optional<Bounds> bounds;
  try {
    bounds.emplace(*lower, *upper);
  } catch (const std::invalid_argument& e) {
    throw FormatError(e.what(), std::max(lower_line, upper_line));
  }

  std::vector<Eigen::VectorXd> starting_points;
  starting_points.reserve(starts.size());
  for (const auto& [point, line] : starts) {
    if (!bounds->strictly_inside(point))
      throw FormatError("starting point is not strictly inside the bounds", line);
    starting_points.push_back(point);
  }

  const Eigen::Index dim = n;
  ResidualFn residual = [asts, dim](const Eigen::VectorXd& x) {
    Eigen::VectorXd r(dim);
    const std::span<const double> view(x.data(), static_cast<size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) r[i] = asts[static_cast<size_t>(i)]->evaluate(view);
    return r;
  };

  return Problem(name, std::move(residual), JacobianFn{}, std::move(*bounds),
                 std::move(starting_points), std::move(solution), std::move(equations));
}

Problem load_problem_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open problem file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error("failed reading problem file: " + path.string());
  return parse_problem_file(buffer.str());
}

std::string serialize_problem(const Problem& problem) {
  if (problem.equations.empty())
    throw Error("problem '" + problem.name + "' carries no expression text; cannot serialize");

  using detail::format_double;
  const auto row = [](const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i) out += ' ';
      out += format_double(v[i]);
    }
    return out;
  };

  std::string out;
  out += "name " + problem.name + "\n";
  out += "vars " + std::to_string(problem.dimension) + "\n";
  for (const auto& eq : problem.equations) out += "eq " + eq + "\n";
  out += "lower " + row(problem.bounds.lower()) + "\n";
  out += "upper " + row(problem.bounds.upper()) + "\n";
  for (const auto& start : problem.starting_points) out += "start " + row(start) + "\n";
  if (problem.known_solution) out += "solution " + row(*problem.known_solution) + "\n";
  return out;
}

}  // namespace strn
