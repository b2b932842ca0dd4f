#pragma once

// Tiny expression language for holomorphic test functions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative, integer only
//   primary := number | number 'i' | 'i' | var | 'exp' '(' expr ')' | '(' expr ')'
//   var     := 'x' (n == 1 only) | 'x' digits
//
// There is no juxtaposition multiplication; `2i` is a single imaginary literal.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "leray/types.hpp"

namespace leray {

struct ParseError : InputError {
  ParseError(const std::string& msg, std::size_t pos)
      : InputError("syntax error at offset " + std::to_string(pos) + ": " + msg),
        offset(pos) {}
  std::size_t offset;
};

class HolomorphicExpr {
 public:
  enum class Op { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Exp };

  struct Node {
    Op op;
    cplx value{};      // Const
    int index = 0;     // Var (0-based) or Pow exponent
    std::shared_ptr<const Node> lhs, rhs;
  };
  using NodePtr = std::shared_ptr<const Node>;

  HolomorphicExpr() : HolomorphicExpr(constant(0.0)) {}

  static HolomorphicExpr constant(cplx c) { return HolomorphicExpr(make(Op::Const, c)); }
  static HolomorphicExpr variable(int idx) {
    return HolomorphicExpr(make(Op::Var, {}, nullptr, nullptr, idx));
  }

  const Node& root() const { return *root_; }
  const NodePtr& node() const { return root_; }

  /// Number of variables the expression was parsed against (0 if built by hand).
  int arity() const { return arity_; }

  cplx operator()(std::span<const cplx> x) const { return eval(*root_, x); }
  cplx operator()(cplx x) const { return eval(*root_, std::span<const cplx>(&x, 1)); }

  friend bool operator==(const HolomorphicExpr& a, const HolomorphicExpr& b) {
    return same(*a.root_, *b.root_);
  }

  // Simplifying constructors (constant folding on 0 and 1 only).
  friend HolomorphicExpr operator+(const HolomorphicExpr& a, const HolomorphicExpr& b) {
    return HolomorphicExpr(add(a.root_, b.root_));
  }
  friend HolomorphicExpr operator-(const HolomorphicExpr& a, const HolomorphicExpr& b) {
    return HolomorphicExpr(sub(a.root_, b.root_));
  }
  friend HolomorphicExpr operator*(const HolomorphicExpr& a, const HolomorphicExpr& b) {
    return HolomorphicExpr(mul(a.root_, b.root_));
  }
  friend HolomorphicExpr operator/(const HolomorphicExpr& a, const HolomorphicExpr& b) {
    return HolomorphicExpr(div(a.root_, b.root_));
  }

  explicit HolomorphicExpr(NodePtr root, int arity = 0) : root_(std::move(root)), arity_(arity) {}

  static NodePtr make(Op op, cplx v = {}, NodePtr l = nullptr, NodePtr r = nullptr, int idx = 0) {
    return std::make_shared<Node>(Node{op, v, idx, std::move(l), std::move(r)});
  }

  static bool is_const(const NodePtr& n, cplx c) { return n->op == Op::Const && n->value == c; }

  static NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make(Op::Const, a->value + b->value);
    return make(Op::Add, {}, std::move(a), std::move(b));
  }
  static NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    if (a->op == Op::Const && b->op == Op::Const) return make(Op::Const, a->value - b->value);
    return make(Op::Sub, {}, std::move(a), std::move(b));
  }
  static NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make(Op::Const, 0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (a->op == Op::Const && b->op == Op::Const) return make(Op::Const, a->value * b->value);
    return make(Op::Mul, {}, std::move(a), std::move(b));
  }
  static NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    if (is_const(a, 0.0) && !is_const(b, 0.0)) return make(Op::Const, 0.0);
    return make(Op::Div, {}, std::move(a), std::move(b));
  }
  static NodePtr neg(NodePtr a) {
    if (a->op == Op::Const) return make(Op::Const, -a->value);
    if (a->op == Op::Neg) return a->lhs;
    return make(Op::Neg, {}, std::move(a));
  }
  static NodePtr pow(NodePtr a, int k) {
    if (k == 0) return make(Op::Const, 1.0);
    if (k == 1) return a;
    return make(Op::Pow, {}, std::move(a), nullptr, k);
  }
  static NodePtr exp(NodePtr a) { return make(Op::Exp, {}, std::move(a)); }

 private:
  static bool same(const Node& a, const Node& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
      case Op::Const: return a.value == b.value;
      case Op::Var: return a.index == b.index;
      case Op::Neg:
      case Op::Exp: return same(*a.lhs, *b.lhs);
      case Op::Pow: return a.index == b.index && same(*a.lhs, *b.lhs);
      default: return same(*a.lhs, *b.lhs) && same(*a.rhs, *b.rhs);
    }
  }

  static cplx eval(const Node& n, std::span<const cplx> x) {
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Var:
        if (static_cast<std::size_t>(n.index) >= x.size())
          throw InputError("expression variable x" + std::to_string(n.index + 1) +
                           " outside point of dimension " + std::to_string(x.size()));
        return x[n.index];
      case Op::Neg: return -eval(*n.lhs, x);
      case Op::Add: return eval(*n.lhs, x) + eval(*n.rhs, x);
      case Op::Sub: return eval(*n.lhs, x) - eval(*n.rhs, x);
      case Op::Mul: return eval(*n.lhs, x) * eval(*n.rhs, x);
      case Op::Div: {
        cplx den = eval(*n.rhs, x);
        if (den == cplx{}) throw PoleError("division by zero at point " + to_string(x));
        return eval(*n.lhs, x) / den;
      }
      case Op::Pow: {
        cplx base = eval(*n.lhs, x);
        int k = n.index;
        if (k < 0 && base == cplx{}) throw PoleError("negative power of zero at point " + to_string(x));
        cplx acc = 1.0, b = k < 0 ? 1.0 / base : base;
        for (unsigned e = static_cast<unsigned>(k < 0 ? -k : k); e; e >>= 1) {
          if (e & 1u) acc *= b;
          b *= b;
        }
        return acc;
      }
      case Op::Exp: return std::exp(eval(*n.lhs, x));
    }
    return {};
  }

  NodePtr root_;
  int arity_ = 0;
};

namespace detail {

class ExprParser {
  using Op = HolomorphicExpr::Op;
  using NodePtr = HolomorphicExpr::NodePtr;

 public:
  ExprParser(std::string_view text, int n) : s_(text), n_(n) {}

  NodePtr parse() {
    if (n_ < 1) throw InputError("expression dimension must be at least 1");
    auto e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = HolomorphicExpr::make(Op::Add, {}, lhs, term());
      else if (accept('-')) lhs = HolomorphicExpr::make(Op::Sub, {}, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = HolomorphicExpr::make(Op::Mul, {}, lhs, unary());
      else if (accept('/')) lhs = HolomorphicExpr::make(Op::Div, {}, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return HolomorphicExpr::make(Op::Neg, {}, unary());
    return power();
  }

  NodePtr power() {
    auto base = primary();
    skip_ws();
    std::size_t at = pos_;
    if (!accept('^')) return base;
    skip_ws();
    std::size_t exp_pos = pos_;
    auto exponent = unary();
    auto k = integer_value(*exponent);
    if (!k) throw ParseError("exponent must be an integer constant", exp_pos == s_.size() ? at : exp_pos);
    return HolomorphicExpr::make(Op::Pow, {}, base, nullptr, *k);
  }

  static std::optional<int> integer_value(const HolomorphicExpr::Node& n) {
    if (n.op == Op::Neg) {
      auto k = integer_value(*n.lhs);
      if (k) return -*k;
      return std::nullopt;
    }
    if (n.op == Op::Pow) {  // right-associated chains such as 2^3^2
      auto b = integer_value(*n.lhs);
      if (!b || n.index < 0) return std::nullopt;
      double v = std::pow(static_cast<double>(*b), n.index);
      if (std::abs(v) > 1e6) return std::nullopt;
      return static_cast<int>(v);
    }
    if (n.op != Op::Const || n.value.imag() != 0.0) return std::nullopt;
    double r = n.value.real();
    if (r != std::floor(r) || std::abs(r) > 1e6) return std::nullopt;
    return static_cast<int>(r);
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return identifier();
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  NodePtr number() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    std::string tok(s_.substr(start, pos_ - start));
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) throw ParseError("malformed number '" + tok + "'", start);
    if (pos_ < s_.size() && s_[pos_] == 'i' &&
        (pos_ + 1 == s_.size() || !std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])))) {
      ++pos_;
      return HolomorphicExpr::make(Op::Const, cplx{0.0, v});
    }
    return HolomorphicExpr::make(Op::Const, cplx{v, 0.0});
  }

  NodePtr identifier() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    std::string id(s_.substr(start, pos_ - start));
    if (id == "i") return HolomorphicExpr::make(Op::Const, cplx{0.0, 1.0});
    if (id == "exp") {
      if (!accept('(')) throw ParseError("expected '(' after exp", pos_);
      auto arg = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return HolomorphicExpr::make(Op::Exp, {}, arg);
    }
    if (id == "x") {
      if (n_ != 1) throw ParseError("bare 'x' is only allowed in dimension 1", start);
      return HolomorphicExpr::make(Op::Var, {}, nullptr, nullptr, 0);
    }
    if (id.size() > 1 && id[0] == 'x' &&
        id.find_first_not_of("0123456789", 1) == std::string::npos) {
      long k = std::strtol(id.c_str() + 1, nullptr, 10);
      if (k < 1 || k > n_)
        throw ParseError("variable " + id + " out of range for dimension " + std::to_string(n_), start);
      return HolomorphicExpr::make(Op::Var, {}, nullptr, nullptr, static_cast<int>(k - 1));
    }
    throw ParseError("unknown identifier '" + id + "'", start);
  }

  std::string_view s_;
  int n_;
  std::size_t pos_ = 0;
};

inline std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  // Keep the literal lexable: strtod accepts these, and "inf"/"nan" never occur
  // for parsed input.
  return s;
}

// Precedence levels used by the printer; higher binds tighter.
inline int precedence(const HolomorphicExpr::Node& n) {
  using Op = HolomorphicExpr::Op;
  switch (n.op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    case Op::Const: {
      // Literals the lexer can reproduce are atoms; anything else prints as a
      // parenthesised sum or negation.
      double re = n.value.real(), im = n.value.imag();
      bool atom = (im == 0.0 && re >= 0.0 && !std::signbit(re)) ||
                  (re == 0.0 && !std::signbit(re) && im >= 0.0 && !std::signbit(im));
      return atom ? 5 : 0;
    }
    default: return 5;
  }
}

inline void print(const HolomorphicExpr::Node& n, int arity, std::string& out);

inline void print_child(const HolomorphicExpr::Node& c, bool paren, int arity, std::string& out) {
  if (paren) out += '(';
  print(c, arity, out);
  if (paren) out += ')';
}

inline void print(const HolomorphicExpr::Node& n, int arity, std::string& out) {
  using Op = HolomorphicExpr::Op;
  switch (n.op) {
    case Op::Const: {
      double re = n.value.real(), im = n.value.imag();
      if (precedence(n) == 5) {
        out += im == 0.0 ? format_real(re) : format_real(im) + "i";
      } else if (im == 0.0) {
        out += "-" + format_real(-re);
      } else {
        out += format_real(re) + (std::signbit(im) ? "-" : "+") + format_real(std::abs(im)) + "i";
      }
      return;
    }
    case Op::Var:
      out += arity == 1 && n.index == 0 ? std::string("x") : "x" + std::to_string(n.index + 1);
      return;
    case Op::Neg:
      out += '-';
      print_child(*n.lhs, precedence(*n.lhs) < 3, arity, out);
      return;
    case Op::Exp:
      out += "exp(";
      print(*n.lhs, arity, out);
      out += ')';
      return;
    case Op::Pow:
      print_child(*n.lhs, precedence(*n.lhs) <= 4, arity, out);
      out += '^';
      out += std::to_string(n.index);
      return;
    default: {
      int p = precedence(n);
      char sym = n.op == Op::Add ? '+' : n.op == Op::Sub ? '-' : n.op == Op::Mul ? '*' : '/';
      print_child(*n.lhs, precedence(*n.lhs) < p, arity, out);
      out += sym;
      print_child(*n.rhs, precedence(*n.rhs) <= p, arity, out);
      return;
    }
  }
}

inline HolomorphicExpr::NodePtr derivative(const HolomorphicExpr::NodePtr& n, int var) {
  using E = HolomorphicExpr;
  using Op = E::Op;
  switch (n->op) {
    case Op::Const: return E::make(Op::Const, 0.0);
    case Op::Var: return E::make(Op::Const, n->index == var ? 1.0 : 0.0);
    case Op::Neg: return E::neg(derivative(n->lhs, var));
    case Op::Add: return E::add(derivative(n->lhs, var), derivative(n->rhs, var));
    case Op::Sub: return E::sub(derivative(n->lhs, var), derivative(n->rhs, var));
    case Op::Mul:
      return E::add(E::mul(derivative(n->lhs, var), n->rhs), E::mul(n->lhs, derivative(n->rhs, var)));
    case Op::Div: {
      auto num = E::sub(E::mul(derivative(n->lhs, var), n->rhs), E::mul(n->lhs, derivative(n->rhs, var)));
      return E::div(num, E::pow(n->rhs, 2));
    }
    case Op::Pow: {
      int k = n->index;
      auto outer = E::mul(E::make(Op::Const, static_cast<double>(k)), E::pow(n->lhs, k - 1));
      return E::mul(outer, derivative(n->lhs, var));
    }
    case Op::Exp: return E::mul(n, derivative(n->lhs, var));
  }
  return E::make(Op::Const, 0.0);
}

}  // namespace detail

/// Parses `text` as a function of n variables.
inline HolomorphicExpr parse_expr(std::string_view text, int n) {
  return HolomorphicExpr(detail::ExprParser(text, n).parse(), n);
}

inline std::string print_expr(const HolomorphicExpr& e) {
  std::string out;
  detail::print(e.root(), e.arity(), out);
  return out;
}

/// Evaluates e at `point`; throws PoleError on an exact division by zero.
inline cplx eval_expr(const HolomorphicExpr& e, std::span<const cplx> point) {
  if (e.arity() > 0 && point.size() != static_cast<std::size_t>(e.arity()))
    throw InputError("point dimension " + std::to_string(point.size()) +
                     " does not match expression dimension " + std::to_string(e.arity()));
  return e(point);
}

/// Exact symbolic derivative with respect to x_{var+1} (0-based index).
inline HolomorphicExpr differentiate(const HolomorphicExpr& e, int var) {
  if (var < 0 || (e.arity() > 0 && var >= e.arity()))
    throw InputError("differentiation variable out of range");
  return HolomorphicExpr(detail::derivative(e.node(), var), e.arity());
}

}  // namespace leray
