#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "strn/problem.hpp"

namespace strn {

// Line-oriented problem text format (conventional extension .nls):
//
//   name <identifier>
//   vars <n>
//   eq <expression>         exactly n lines, in order F1..Fn
//   lower <n values>        inf / -inf are allowed in bounds lines only
//   upper <n values>
//   start <n values>        one or more lines, each strictly inside the box
//   solution <n values>     optional
//
// '#' starts a comment, blank lines are skipped, and 'vars' must precede
// every line whose meaning depends on the dimension. The resulting problem
// evaluates the parsed expressions as its residual and uses finite
// differences for the Jacobian. Every failure is a FormatError carrying the
// offending 1-based line number (0 when the file as a whole is at fault,
// e.g. a section is missing entirely).
Problem parse_problem_file(std::string_view text);

// Reads the file at path and parses it; failure to read throws Error.
Problem load_problem_file(const std::filesystem::path& path);

// Inverse of parse_problem_file, with numbers in shortest round-trip form.
// The problem must carry expression text for its equations (problems parsed
// from files and the built-in suite both do); throws Error otherwise.
std::string serialize_problem(const Problem& problem);

}  // namespace strn
