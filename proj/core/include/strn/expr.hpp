#pragma once

#include <memory>
#include <span>
#include <string_view>

namespace strn::dsl {

namespace detail {
struct ExprNode;
}

class Expr;

// Parsed expressions are immutable and shared freely across threads.
using ExprPtr = std::shared_ptr<const Expr>;

// Parses one expression over the variables x1..x<n_vars>. Grammar:
//
//   expr    = term { ("+" | "-") term }
//   term    = factor { ("*" | "/") factor }
//   factor  = "-" factor | power
//   power   = primary [ "^" factor ]          right-associative, 2^-3 is legal
//   primary = number | variable | function "(" expr ")" | "(" expr ")"
//
// so "-x1^2" means -(x1^2). Functions: exp, log, sin, cos, tan, sqrt, abs.
// Errors carry 1-based line/column: SyntaxError for malformed input (including
// nesting beyond an internal depth cap, so no input can overflow the stack),
// UnknownIdentifier for names that are neither variables nor functions, and
// VariableIndexOutOfRange for x0 or an index past n_vars.
ExprPtr parse_expression(std::string_view text, int n_vars);

class Expr {
 public:
  // Plain IEEE arithmetic: division by zero yields +-inf and is returned
  // as-is, as is any non-finite value produced by + - * / ^ (0^0 is 1, per
  // std::pow). Only a NaN coming out of a named function application (for
  // example log(-1) or sqrt(-1)) throws NonFiniteEvaluation.
  double evaluate(std::span<const double> x) const;

  ~Expr();
  Expr(const Expr&) = delete;
  Expr& operator=(const Expr&) = delete;

 private:
  Expr();
  std::unique_ptr<detail::ExprNode> root_;
  friend ExprPtr parse_expression(std::string_view, int);
};

}  // namespace strn::dsl
