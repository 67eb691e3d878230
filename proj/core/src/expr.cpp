#include "strn/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "strn/errors.hpp"

namespace strn::dsl {

namespace {
enum class BinOp { Add, Sub, Mul, Div, Pow };
enum class FnId { Exp, Log, Sin, Cos, Tan, Sqrt, Abs };
}  // namespace

namespace detail {

struct ExprNode {
  struct Number {
    double value;
  };
  struct Variable {
    int index;  // 0-based
  };
  struct Negate {
    std::unique_ptr<ExprNode> child;
  };
  struct Binary {
    BinOp op;
    std::unique_ptr<ExprNode> lhs;
    std::unique_ptr<ExprNode> rhs;
  };
  struct Call {
    FnId fn;
    std::unique_ptr<ExprNode> arg;
  };

  std::variant<Number, Variable, Negate, Binary, Call> v;
};

}  // namespace detail

Expr::Expr() = default;
Expr::~Expr() = default;

namespace {

using Node = detail::ExprNode;
using NodePtr = std::unique_ptr<Node>;

NodePtr make_node(decltype(Node::v) v) {
  auto n = std::make_unique<Node>();
  n->v = std::move(v);
  return n;
}

double apply_fn(FnId fn, double a) {
  switch (fn) {
    case FnId::Exp: return std::exp(a);
    case FnId::Log: return std::log(a);
    case FnId::Sin: return std::sin(a);
    case FnId::Cos: return std::cos(a);
    case FnId::Tan: return std::tan(a);
    case FnId::Sqrt: return std::sqrt(a);
    case FnId::Abs: return std::abs(a);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double eval_node(const Node& node, std::span<const double> x) {
  struct Visitor {
    std::span<const double> x;
    double operator()(const Node::Number& n) const { return n.value; }
    double operator()(const Node::Variable& n) const {
      return x[static_cast<size_t>(n.index)];
    }
    double operator()(const Node::Negate& n) const { return -eval_node(*n.child, x); }
    double operator()(const Node::Binary& n) const {
      const double a = eval_node(*n.lhs, x);
      const double b = eval_node(*n.rhs, x);
      switch (n.op) {
        case BinOp::Add: return a + b;
        case BinOp::Sub: return a - b;
        case BinOp::Mul: return a * b;
        case BinOp::Div: return a / b;
        case BinOp::Pow: return std::pow(a, b);
      }
      return std::numeric_limits<double>::quiet_NaN();
    }
    double operator()(const Node::Call& n) const {
      const double r = apply_fn(n.fn, eval_node(*n.arg, x));
      if (std::isnan(r)) throw NonFiniteEvaluation("function application produced NaN");
      return r;
    }
  };
  return std::visit(Visitor{x}, node.v);
}

// --- tokenizer -----------------------------------------------------------

enum class TokKind { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
  TokKind kind = TokKind::End;
  double number = 0.0;
  std::string ident;
  int line = 1;
  int column = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_ws();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= text_.size()) return tok;
    const char c = text_[pos_];
    switch (c) {
      case '+': advance(); tok.kind = TokKind::Plus; return tok;
      case '-': advance(); tok.kind = TokKind::Minus; return tok;
      case '*': advance(); tok.kind = TokKind::Star; return tok;
      case '/': advance(); tok.kind = TokKind::Slash; return tok;
      case '^': advance(); tok.kind = TokKind::Caret; return tok;
      case '(': advance(); tok.kind = TokKind::LParen; return tok;
      case ')': advance(); tok.kind = TokKind::RParen; return tok;
      default: break;
    }
    if (is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1])))
      return lex_number(tok);
    if (is_ident_start(c)) return lex_ident(tok);
    throw SyntaxError("unexpected character '" + printable(c) + "'", line_, column_);
  }

 private:
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  static std::string printable(char c) {
    if (c >= 0x20 && c < 0x7f) return std::string(1, c);
    char buf[8];
    std::snprintf(buf, sizeof buf, "\\x%02x", static_cast<unsigned char>(c));
    return buf;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' ||
                                   text_[pos_] == '\r' || text_[pos_] == '\n'))
      advance();
  }

  Token lex_number(Token tok) {
    const size_t start = pos_;
    while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      advance();
      while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
    }
    // Take an exponent part only when digits actually follow, so "2e" lexes
    // as the number 2 followed by the identifier "e".
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      size_t probe = pos_ + 1;
      if (probe < text_.size() && (text_[probe] == '+' || text_[probe] == '-')) ++probe;
      if (probe < text_.size() && is_digit(text_[probe])) {
        while (pos_ < probe) advance();
        while (pos_ < text_.size() && is_digit(text_[pos_])) advance();
      }
    }
    const std::string_view span = text_.substr(start, pos_ - start);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(span.data(), span.data() + span.size(), value);
    if (ec != std::errc{} || end != span.data() + span.size())
      throw SyntaxError("malformed number literal '" + std::string(span) + "'", tok.line,
                        tok.column);
    tok.kind = TokKind::Number;
    tok.number = value;
    return tok;
  }

  Token lex_ident(Token tok) {
    const size_t start = pos_;
    while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
    tok.kind = TokKind::Ident;
    tok.ident = std::string(text_.substr(start, pos_ - start));
    return tok;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

// --- recursive-descent parser --------------------------------------------

constexpr int kMaxDepth = 256;

class Parser {
 public:
  Parser(std::string_view text, int n_vars) : lexer_(text), n_vars_(n_vars) {
    current_ = lexer_.next();
  }

  NodePtr parse() {
    NodePtr e = parse_expr(0);
    if (current_.kind != TokKind::End)
      throw SyntaxError("unexpected trailing input", current_.line, current_.column);
    return e;
  }

 private:
  void bump() { current_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw SyntaxError(what, current_.line, current_.column);
  }

  void check_depth(int depth) const {
    if (depth > kMaxDepth)
      throw SyntaxError("expression nested too deeply", current_.line, current_.column);
  }

  NodePtr parse_expr(int depth) {
    check_depth(depth);
    NodePtr lhs = parse_term(depth + 1);
    while (current_.kind == TokKind::Plus || current_.kind == TokKind::Minus) {
      const BinOp op = current_.kind == TokKind::Plus ? BinOp::Add : BinOp::Sub;
      bump();
      NodePtr rhs = parse_term(depth + 1);
      lhs = make_node(Node::Binary{op, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  NodePtr parse_term(int depth) {
    check_depth(depth);
    NodePtr lhs = parse_factor(depth + 1);
    while (current_.kind == TokKind::Star || current_.kind == TokKind::Slash) {
      const BinOp op = current_.kind == TokKind::Star ? BinOp::Mul : BinOp::Div;
      bump();
      NodePtr rhs = parse_factor(depth + 1);
      lhs = make_node(Node::Binary{op, std::move(lhs), std::move(rhs)});
    }
    return lhs;
  }

  NodePtr parse_factor(int depth) {
    check_depth(depth);
    if (current_.kind == TokKind::Minus) {
      bump();
      return make_node(Node::Negate{parse_factor(depth + 1)});
    }
    return parse_power(depth + 1);
  }

  NodePtr parse_power(int depth) {
    check_depth(depth);
    NodePtr base = parse_primary(depth + 1);
    if (current_.kind == TokKind::Caret) {
      bump();
      NodePtr exponent = parse_factor(depth + 1);
      return make_node(Node::Binary{BinOp::Pow, std::move(base), std::move(exponent)});
    }
    return base;
  }

  NodePtr parse_primary(int depth) {
    check_depth(depth);
    switch (current_.kind) {
      case TokKind::Number: {
        const double v = current_.number;
        bump();
        return make_node(Node::Number{v});
      }
      case TokKind::LParen: {
        bump();
        NodePtr inner = parse_expr(depth + 1);
        if (current_.kind != TokKind::RParen) fail("expected ')'");
        bump();
        return inner;
      }
      case TokKind::Ident: return parse_ident(depth);
      case TokKind::End: fail("unexpected end of expression");
      default: fail("expected a number, variable, function, or '('");
    }
  }

  NodePtr parse_ident(int depth) {
    const Token tok = current_;
    bump();

    if (tok.ident.size() >= 2 && tok.ident[0] == 'x' &&
        tok.ident.find_first_not_of("0123456789", 1) == std::string::npos) {
      int index = 0;
      const auto [end, ec] =
          std::from_chars(tok.ident.data() + 1, tok.ident.data() + tok.ident.size(), index);
      if (ec != std::errc{} || end != tok.ident.data() + tok.ident.size() || index < 1 ||
          index > n_vars_)
        throw VariableIndexOutOfRange("variable '" + tok.ident + "' is out of range (have x1..x" +
                                          std::to_string(n_vars_) + ")",
                                      tok.line, tok.column);
      return make_node(Node::Variable{index - 1});
    }

    static constexpr std::pair<std::string_view, FnId> kFunctions[] = {
        {"exp", FnId::Exp}, {"log", FnId::Log},   {"sin", FnId::Sin}, {"cos", FnId::Cos},
        {"tan", FnId::Tan}, {"sqrt", FnId::Sqrt}, {"abs", FnId::Abs},
    };
    for (const auto& [name, fn] : kFunctions) {
      if (tok.ident == name) {
        if (current_.kind != TokKind::LParen)
          throw SyntaxError("expected '(' after function '" + tok.ident + "'", current_.line,
                            current_.column);
        bump();
        NodePtr arg = parse_expr(depth + 1);
        if (current_.kind != TokKind::RParen) fail("expected ')'");
        bump();
        return make_node(Node::Call{fn, std::move(arg)});
      }
    }
    throw UnknownIdentifier("unknown identifier '" + tok.ident + "'", tok.line, tok.column);
  }

  Lexer lexer_;
  Token current_;
  int n_vars_;
};

}  // namespace

double Expr::evaluate(std::span<const double> x) const { return eval_node(*root_, x); }

ExprPtr parse_expression(std::string_view text, int n_vars) {
  if (n_vars < 0) throw std::invalid_argument("parse_expression: negative variable count");
  NodePtr root = Parser(text, n_vars).parse();
  auto expr = std::shared_ptr<Expr>(new Expr());
  expr->root_ = std::move(root);
  return expr;
}

}  // namespace strn::dsl
