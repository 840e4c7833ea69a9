#pragma once

// Closed-form expression DSL used to define the free term f(t) and the
// kernel K(t,s) of a problem in plain text.
//
// Grammar (EBNF):
//   expr      := term (("+"|"-") term)*
//   term      := factor (("*"|"/") factor)*
//   factor    := "-" factor | power
//   power     := atom ("^" factor)?
//   atom      := number | var | "pi" | func "(" expr ("," expr)* ")"
//              | "(" expr ")" | piecewise
//   piecewise := "piecewise" "(" arm ("," arm)* "," "else" "->" expr ")"
//   arm       := expr cmp expr "->" expr
//   cmp       := "<" | "<=" | ">" | ">="
//
// "^" binds tightest and is right-associative, then unary minus, then
// "*" and "/", then "+" and "-".  There is no implicit multiplication:
// "4t" is a syntax error, write "4*t".

#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace fredlat {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };
enum class CompareOp { Lt, Le, Gt, Ge };
enum class Builtin { Sin, Cos, Exp, Log, Abs, Sqrt, Min, Max };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberNode {
  double value;
};
struct VariableNode {
  std::string name;
};
struct PiNode {};
struct NegateNode {
  ExprPtr operand;
};
struct BinaryNode {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};
struct CallNode {
  Builtin fn;
  std::vector<ExprPtr> args;
};
struct PiecewiseArm {
  ExprPtr lhs;
  CompareOp cmp;
  ExprPtr rhs;
  ExprPtr value;
};
struct PiecewiseNode {
  std::vector<PiecewiseArm> arms;
  ExprPtr otherwise;
};

class Expr {
public:
  using Node = std::variant<NumberNode, VariableNode, PiNode, NegateNode,
                            BinaryNode, CallNode, PiecewiseNode>;

  explicit Expr(Node node) : node_(std::move(node)) {}
  const Node& node() const { return node_; }

private:
  Node node_;
};

inline ExprPtr make_number(double v) { return std::make_shared<Expr>(NumberNode{v}); }
inline ExprPtr make_variable(std::string name) {
  return std::make_shared<Expr>(VariableNode{std::move(name)});
}
inline ExprPtr make_pi() { return std::make_shared<Expr>(PiNode{}); }
inline ExprPtr make_negate(ExprPtr e) { return std::make_shared<Expr>(NegateNode{std::move(e)}); }
inline ExprPtr make_binary(BinaryOp op, ExprPtr l, ExprPtr r) {
  return std::make_shared<Expr>(BinaryNode{op, std::move(l), std::move(r)});
}
inline ExprPtr make_call(Builtin fn, std::vector<ExprPtr> args) {
  return std::make_shared<Expr>(CallNode{fn, std::move(args)});
}
inline ExprPtr make_piecewise(std::vector<PiecewiseArm> arms, ExprPtr otherwise) {
  return std::make_shared<Expr>(PiecewiseNode{std::move(arms), std::move(otherwise)});
}

/// Thrown on malformed source text; `position` is the byte offset of the
/// offending token (or of end-of-input).
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const { return position_; }

private:
  std::size_t position_;
};

/// Thrown when evaluation hits a domain error (log of a non-positive
/// value, division by zero, a non-finite intermediate).  The message
/// names the offending sub-expression.
class EvalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Which one-sided limit a piecewise guard should see.  `None` evaluates
/// guards exactly as written; `Left`/`Right` nudge the t passed to guard
/// expressions by one ulp, so that at a piecewise boundary the arm
/// selected is the one governing the left/right limit.
enum class LimitSide { None, Left, Right };

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline int precedence_of(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add:
    case BinaryOp::Sub: return 1;
    case BinaryOp::Mul:
    case BinaryOp::Div: return 2;
    case BinaryOp::Pow: return 4;
  }
  return 5;
}

inline int precedence_of(const Expr& e) {
  struct V {
    int operator()(const NumberNode&) const { return 5; }
    int operator()(const VariableNode&) const { return 5; }
    int operator()(const PiNode&) const { return 5; }
    int operator()(const NegateNode&) const { return 3; }
    int operator()(const BinaryNode& b) const { return precedence_of(b.op); }
    int operator()(const CallNode&) const { return 5; }
    int operator()(const PiecewiseNode&) const { return 5; }
  };
  return std::visit(V{}, e.node());
}

inline const char* builtin_name(Builtin fn) {
  switch (fn) {
    case Builtin::Sin: return "sin";
    case Builtin::Cos: return "cos";
    case Builtin::Exp: return "exp";
    case Builtin::Log: return "log";
    case Builtin::Abs: return "abs";
    case Builtin::Sqrt: return "sqrt";
    case Builtin::Min: return "min";
    case Builtin::Max: return "max";
  }
  return "?";
}

inline const char* compare_name(CompareOp c) {
  switch (c) {
    case CompareOp::Lt: return "<";
    case CompareOp::Le: return "<=";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
  }
  return "?";
}

inline std::string format_literal(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void unparse_into(const Expr& e, std::string& out);

inline void unparse_child(const Expr& child, bool parens, std::string& out) {
  if (parens) out += '(';
  unparse_into(child, out);
  if (parens) out += ')';
}

inline void unparse_into(const Expr& e, std::string& out) {
  struct V {
    std::string& out;
    void operator()(const NumberNode& n) const { out += format_literal(n.value); }
    void operator()(const VariableNode& v) const { out += v.name; }
    void operator()(const PiNode&) const { out += "pi"; }
    void operator()(const NegateNode& n) const {
      out += '-';
      unparse_child(*n.operand, precedence_of(*n.operand) < 3, out);
    }
    void operator()(const BinaryNode& b) const {
      const int p = precedence_of(b.op);
      const char* sym = nullptr;
      switch (b.op) {
        case BinaryOp::Add: sym = "+"; break;
        case BinaryOp::Sub: sym = "-"; break;
        case BinaryOp::Mul: sym = "*"; break;
        case BinaryOp::Div: sym = "/"; break;
        case BinaryOp::Pow: sym = "^"; break;
      }
      if (b.op == BinaryOp::Pow) {
        // Right-associative: "(a^b)^c" needs the parentheses, "a^b^c"
        // re-parses as a^(b^c).  The exponent slot accepts any factor,
        // so negations and powers print bare there.
        unparse_child(*b.lhs, precedence_of(*b.lhs) <= p, out);
        out += sym;
        unparse_child(*b.rhs, precedence_of(*b.rhs) < 3, out);
      } else {
        // Left-associative chain: equal precedence is fine on the left,
        // needs parentheses on the right ("a-(b-c)").
        unparse_child(*b.lhs, precedence_of(*b.lhs) < p, out);
        out += sym;
        unparse_child(*b.rhs, precedence_of(*b.rhs) <= p, out);
      }
    }
    void operator()(const CallNode& c) const {
      out += builtin_name(c.fn);
      out += '(';
      for (std::size_t i = 0; i < c.args.size(); ++i) {
        if (i) out += ", ";
        unparse_into(*c.args[i], out);
      }
      out += ')';
    }
    void operator()(const PiecewiseNode& p) const {
      out += "piecewise(";
      for (const auto& arm : p.arms) {
        unparse_into(*arm.lhs, out);
        out += ' ';
        out += compare_name(arm.cmp);
        out += ' ';
        unparse_into(*arm.rhs, out);
        out += " -> ";
        unparse_into(*arm.value, out);
        out += ", ";
      }
      out += "else -> ";
      unparse_into(*p.otherwise, out);
      out += ')';
    }
  };
  std::visit(V{out}, e.node());
}

}  // namespace detail

/// Renders the AST back to source text with minimal parentheses.
/// parse(unparse(e)) reconstructs a structurally identical AST.
inline std::string unparse(const Expr& e) {
  std::string out;
  detail::unparse_into(e, out);
  return out;
}
inline std::string unparse(const ExprPtr& e) { return unparse(*e); }

/// Structural equality of two ASTs.  Numeric literals compare as exact
/// doubles.
inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.node().index() != b.node().index()) return false;
  struct V {
    const Expr::Node& other;
    bool operator()(const NumberNode& n) const {
      return n.value == std::get<NumberNode>(other).value;
    }
    bool operator()(const VariableNode& v) const {
      return v.name == std::get<VariableNode>(other).name;
    }
    bool operator()(const PiNode&) const { return true; }
    bool operator()(const NegateNode& n) const {
      return structurally_equal(*n.operand, *std::get<NegateNode>(other).operand);
    }
    bool operator()(const BinaryNode& b) const {
      const auto& o = std::get<BinaryNode>(other);
      return b.op == o.op && structurally_equal(*b.lhs, *o.lhs) &&
             structurally_equal(*b.rhs, *o.rhs);
    }
    bool operator()(const CallNode& c) const {
      const auto& o = std::get<CallNode>(other);
      if (c.fn != o.fn || c.args.size() != o.args.size()) return false;
      for (std::size_t i = 0; i < c.args.size(); ++i)
        if (!structurally_equal(*c.args[i], *o.args[i])) return false;
      return true;
    }
    bool operator()(const PiecewiseNode& p) const {
      const auto& o = std::get<PiecewiseNode>(other);
      if (p.arms.size() != o.arms.size()) return false;
      for (std::size_t i = 0; i < p.arms.size(); ++i) {
        const auto& x = p.arms[i];
        const auto& y = o.arms[i];
        if (x.cmp != y.cmp || !structurally_equal(*x.lhs, *y.lhs) ||
            !structurally_equal(*x.rhs, *y.rhs) ||
            !structurally_equal(*x.value, *y.value))
          return false;
      }
      return structurally_equal(*p.otherwise, *o.otherwise);
    }
  };
  return std::visit(V{b.node()}, a.node());
}
inline bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
  return structurally_equal(*a, *b);
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

enum class TokenKind {
  Number, Ident, Plus, Minus, Star, Slash, Caret,
  LParen, RParen, Comma, Lt, Le, Gt, Ge, Arrow, End
};

struct Token {
  TokenKind kind;
  std::size_t position;
  std::string_view text;
  double value = 0.0;  // for Number
};

class Lexer {
public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    while (pos_ < src_.size() && is_space(src_[pos_])) ++pos_;
    const std::size_t start = pos_;
    if (pos_ >= src_.size()) return {TokenKind::End, start, {}};
    const char c = src_[pos_];
    if (is_digit(c) || (c == '.' && pos_ + 1 < src_.size() && is_digit(src_[pos_ + 1]))) {
      double value = 0.0;
      const char* first = src_.data() + pos_;
      const char* last = src_.data() + src_.size();
      auto res = std::from_chars(first, last, value);
      if (res.ec != std::errc() || !std::isfinite(value))
        throw ParseError("invalid numeric literal", start);
      pos_ = static_cast<std::size_t>(res.ptr - src_.data());
      return {TokenKind::Number, start, src_.substr(start, pos_ - start), value};
    }
    if (is_ident_start(c)) {
      std::size_t end = pos_;
      while (end < src_.size() && is_ident_char(src_[end])) ++end;
      Token t{TokenKind::Ident, start, src_.substr(start, end - start)};
      pos_ = end;
      return t;
    }
    ++pos_;
    switch (c) {
      case '+': return {TokenKind::Plus, start, src_.substr(start, 1)};
      case '-':
        if (pos_ < src_.size() && src_[pos_] == '>') {
          ++pos_;
          return {TokenKind::Arrow, start, src_.substr(start, 2)};
        }
        return {TokenKind::Minus, start, src_.substr(start, 1)};
      case '*': return {TokenKind::Star, start, src_.substr(start, 1)};
      case '/': return {TokenKind::Slash, start, src_.substr(start, 1)};
      case '^': return {TokenKind::Caret, start, src_.substr(start, 1)};
      case '(': return {TokenKind::LParen, start, src_.substr(start, 1)};
      case ')': return {TokenKind::RParen, start, src_.substr(start, 1)};
      case ',': return {TokenKind::Comma, start, src_.substr(start, 1)};
      case '<':
        if (pos_ < src_.size() && src_[pos_] == '=') {
          ++pos_;
          return {TokenKind::Le, start, src_.substr(start, 2)};
        }
        return {TokenKind::Lt, start, src_.substr(start, 1)};
      case '>':
        if (pos_ < src_.size() && src_[pos_] == '=') {
          ++pos_;
          return {TokenKind::Ge, start, src_.substr(start, 2)};
        }
        return {TokenKind::Gt, start, src_.substr(start, 1)};
      default:
        throw ParseError("unexpected character '" + std::string(1, c) + "'", start);
    }
  }

private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }
  static bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
  }
  static bool is_ident_char(char c) { return is_ident_start(c) || is_digit(c); }

  std::string_view src_;
  std::size_t pos_ = 0;
};

inline std::optional<Builtin> builtin_by_name(std::string_view name) {
  if (name == "sin") return Builtin::Sin;
  if (name == "cos") return Builtin::Cos;
  if (name == "exp") return Builtin::Exp;
  if (name == "log") return Builtin::Log;
  if (name == "abs") return Builtin::Abs;
  if (name == "sqrt") return Builtin::Sqrt;
  if (name == "min") return Builtin::Min;
  if (name == "max") return Builtin::Max;
  return std::nullopt;
}

inline std::size_t builtin_arity(Builtin fn) {
  return (fn == Builtin::Min || fn == Builtin::Max) ? 2 : 1;
}

class Parser {
public:
  Parser(std::string_view src, const std::set<std::string>& allowed_vars)
      : lexer_(src), vars_(allowed_vars) {
    advance();
  }

  ExprPtr run() {
    ExprPtr e = parse_expr();
    expect(TokenKind::End, "expected end of input");
    return e;
  }

private:
  void advance() { cur_ = lexer_.next(); }

  bool accept(TokenKind k) {
    if (cur_.kind != k) return false;
    advance();
    return true;
  }

  void expect(TokenKind k, const char* what) {
    if (cur_.kind != k) throw ParseError(what, cur_.position);
    advance();
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    for (;;) {
      if (accept(TokenKind::Plus)) {
        e = make_binary(BinaryOp::Add, e, parse_term());
      } else if (accept(TokenKind::Minus)) {
        e = make_binary(BinaryOp::Sub, e, parse_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    for (;;) {
      if (accept(TokenKind::Star)) {
        e = make_binary(BinaryOp::Mul, e, parse_factor());
      } else if (accept(TokenKind::Slash)) {
        e = make_binary(BinaryOp::Div, e, parse_factor());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_factor() {
    if (accept(TokenKind::Minus)) return make_negate(parse_factor());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_atom();
    if (accept(TokenKind::Caret)) return make_binary(BinaryOp::Pow, base, parse_factor());
    return base;
  }

  ExprPtr parse_atom() {
    const Token t = cur_;
    switch (t.kind) {
      case TokenKind::Number:
        advance();
        return make_number(t.value);
      case TokenKind::LParen: {
        advance();
        ExprPtr e = parse_expr();
        expect(TokenKind::RParen, "expected ')'");
        return e;
      }
      case TokenKind::Ident: {
        const std::string name(t.text);
        if (name == "pi") {
          advance();
          return make_pi();
        }
        if (name == "piecewise") {
          advance();
          return parse_piecewise(t.position);
        }
        if (auto fn = builtin_by_name(name)) {
          advance();
          expect(TokenKind::LParen, "expected '(' after function name");
          std::vector<ExprPtr> args;
          args.push_back(parse_expr());
          while (accept(TokenKind::Comma)) args.push_back(parse_expr());
          expect(TokenKind::RParen, "expected ')'");
          if (args.size() != builtin_arity(*fn))
            throw ParseError(std::string(builtin_name(*fn)) + " expects " +
                                 std::to_string(builtin_arity(*fn)) + " argument(s), got " +
                                 std::to_string(args.size()),
                             t.position);
          return make_call(*fn, std::move(args));
        }
        if (name == "else")
          throw ParseError("'else' is only valid inside piecewise(...)", t.position);
        if (!vars_.contains(name))
          throw ParseError("variable '" + name + "' is not allowed here", t.position);
        advance();
        return make_variable(name);
      }
      default:
        throw ParseError("expected a number, variable, function call or '('",
                         t.position);
    }
  }

  ExprPtr parse_piecewise(std::size_t kw_position) {
    expect(TokenKind::LParen, "expected '(' after piecewise");
    if (cur_.kind == TokenKind::RParen)
      throw ParseError("empty piecewise: at least one guarded arm is required",
                       cur_.position);
    if (cur_.kind == TokenKind::Ident && cur_.text == "else")
      throw ParseError("empty piecewise: at least one guarded arm is required before else",
                       cur_.position);
    std::vector<PiecewiseArm> arms;
    for (;;) {
      arms.push_back(parse_arm());
      if (!accept(TokenKind::Comma)) {
        if (cur_.kind == TokenKind::RParen)
          throw ParseError("piecewise lacks a final unconditional 'else -> ...' arm",
                           cur_.position);
        expect(TokenKind::Comma, "expected ',' between piecewise arms");
      }
      if (cur_.kind == TokenKind::Ident && cur_.text == "else") {
        advance();
        expect(TokenKind::Arrow, "expected '->' after else");
        ExprPtr otherwise = parse_expr();
        expect(TokenKind::RParen, "expected ')' closing piecewise");
        return make_piecewise(std::move(arms), std::move(otherwise));
      }
    }
    (void)kw_position;
  }

  PiecewiseArm parse_arm() {
    ExprPtr lhs = parse_expr();
    CompareOp cmp;
    if (accept(TokenKind::Lt)) {
      cmp = CompareOp::Lt;
    } else if (accept(TokenKind::Le)) {
      cmp = CompareOp::Le;
    } else if (accept(TokenKind::Gt)) {
      cmp = CompareOp::Gt;
    } else if (accept(TokenKind::Ge)) {
      cmp = CompareOp::Ge;
    } else {
      throw ParseError("expected a comparison in piecewise arm", cur_.position);
    }
    ExprPtr rhs = parse_expr();
    expect(TokenKind::Arrow, "expected '->' after piecewise guard");
    ExprPtr value = parse_expr();
    return PiecewiseArm{std::move(lhs), cmp, std::move(rhs), std::move(value)};
  }

  Lexer lexer_;
  Token cur_{TokenKind::End, 0, {}};
  const std::set<std::string>& vars_;
};

}  // namespace detail

/// Parses `source` into an AST.  Only variables named in `allowed_vars`
/// may appear (f-expressions take {"t"}, kernels {"t","s"}).
inline ExprPtr parse(std::string_view source, const std::set<std::string>& allowed_vars) {
  detail::Parser p(source, allowed_vars);
  return p.run();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

[[noreturn]] inline void eval_fail(const char* what, const Expr& at) {
  throw EvalError(std::string(what) + " in '" + unparse(at) + "'");
}

inline double nudge(double t, LimitSide side) {
  switch (side) {
    case LimitSide::Left: return std::nextafter(t, -std::numeric_limits<double>::infinity());
    case LimitSide::Right: return std::nextafter(t, std::numeric_limits<double>::infinity());
    case LimitSide::None: break;
  }
  return t;
}

inline double eval_node(const Expr& e, double t, const std::optional<double>& s,
                        LimitSide side) {
  struct V {
    const Expr& expr;
    double t;
    const std::optional<double>& s;
    LimitSide side;

    double check(double v) const {
      if (!std::isfinite(v)) eval_fail("non-finite result", expr);
      return v;
    }

    double operator()(const NumberNode& n) const { return n.value; }
    double operator()(const VariableNode& v) const {
      if (v.name == "t") return t;
      if (v.name == "s") {
        if (!s) eval_fail("variable 's' is unbound", expr);
        return *s;
      }
      eval_fail("unbound variable", expr);
    }
    double operator()(const PiNode&) const { return std::numbers::pi; }
    double operator()(const NegateNode& n) const {
      return -eval_node(*n.operand, t, s, side);
    }
    double operator()(const BinaryNode& b) const {
      const double l = eval_node(*b.lhs, t, s, side);
      const double r = eval_node(*b.rhs, t, s, side);
      switch (b.op) {
        case BinaryOp::Add: return check(l + r);
        case BinaryOp::Sub: return check(l - r);
        case BinaryOp::Mul: return check(l * r);
        case BinaryOp::Div:
          if (r == 0.0) eval_fail("division by zero", expr);
          return check(l / r);
        case BinaryOp::Pow:
          return check(std::pow(l, r));
      }
      eval_fail("unknown operator", expr);
    }
    double operator()(const CallNode& c) const {
      const double a0 = eval_node(*c.args[0], t, s, side);
      switch (c.fn) {
        case Builtin::Sin: return check(std::sin(a0));
        case Builtin::Cos: return check(std::cos(a0));
        case Builtin::Exp: return check(std::exp(a0));
        case Builtin::Log:
          if (a0 <= 0.0) eval_fail("log of a non-positive value", expr);
          return check(std::log(a0));
        case Builtin::Abs: return check(std::fabs(a0));
        case Builtin::Sqrt:
          if (a0 < 0.0) eval_fail("sqrt of a negative value", expr);
          return check(std::sqrt(a0));
        case Builtin::Min: return std::fmin(a0, eval_node(*c.args[1], t, s, side));
        case Builtin::Max: return std::fmax(a0, eval_node(*c.args[1], t, s, side));
      }
      eval_fail("unknown function", expr);
    }
    double operator()(const PiecewiseNode& p) const {
      // Guards see t nudged by one ulp toward the requested side, so at a
      // piecewise boundary the selected arm matches the one-sided limit.
      // The arm's value is still evaluated at the exact t.
      const double tg = nudge(t, side);
      for (const auto& arm : p.arms) {
        const double gl = eval_node(*arm.lhs, tg, s, side);
        const double gr = eval_node(*arm.rhs, tg, s, side);
        bool hold = false;
        switch (arm.cmp) {
          case CompareOp::Lt: hold = gl < gr; break;
          case CompareOp::Le: hold = gl <= gr; break;
          case CompareOp::Gt: hold = gl > gr; break;
          case CompareOp::Ge: hold = gl >= gr; break;
        }
        if (hold) return eval_node(*arm.value, t, s, side);
      }
      return eval_node(*p.otherwise, t, s, side);
    }
  };
  return std::visit(V{e, t, s, side}, e.node());
}

}  // namespace detail

/// Evaluates `e` at the point (t, s).  Piecewise arms are tried in order;
/// the first arm whose guard holds wins.  `side` selects which one-sided
/// limit guards should represent at piecewise boundaries (None = exactly
/// as written).
inline double evaluate(const Expr& e, double t,
                       std::optional<double> s = std::nullopt,
                       LimitSide side = LimitSide::None) {
  return detail::eval_node(e, t, s, side);
}
inline double evaluate(const ExprPtr& e, double t,
                       std::optional<double> s = std::nullopt,
                       LimitSide side = LimitSide::None) {
  return detail::eval_node(*e, t, s, side);
}

}  // namespace fredlat
