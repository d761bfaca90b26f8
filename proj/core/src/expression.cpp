// SPDX-License-Identifier: Apache-2.0
#include "mfginv/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>

#include "mfginv/errors.hpp"

namespace mfginv {

struct Expr::Node {
  Op op;
  double value = 0.0;  // Const
  Variable var = Variable::X1;
  Expr a, b;
};

namespace {
const char* var_name(Variable v) {
  switch (v) {
    case Variable::X1: return "x1";
    case Variable::X2: return "x2";
    case Variable::X3: return "x3";
    case Variable::T: return "t";
  }
  return "?";
}
}  // namespace

// Leaves carry null children; default-constructed children would recurse.
Expr::Expr() : Expr(constant(0.0)) {}

Expr Expr::constant(double c) {
  auto n = std::shared_ptr<Node>(new Node{Op::Const, c, Variable::X1, Expr(nullptr), Expr(nullptr)});
  return Expr(std::move(n));
}

Expr Expr::var(Variable v) {
  auto n = std::shared_ptr<Node>(new Node{Op::Var, 0.0, v, Expr(nullptr), Expr(nullptr)});
  return Expr(std::move(n));
}

Expr Expr::make(Op op, Expr a, Expr b) {
  auto n = std::shared_ptr<Node>(new Node{op, 0.0, Variable::X1, std::move(a), std::move(b)});
  return Expr(std::move(n));
}

bool Expr::is_constant() const { return node_->op == Op::Const; }
double Expr::constant_value() const { return node_->value; }
Expr::Op Expr::op() const { return node_->op; }

double Expr::eval(const EvalPoint& p) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return n.value;
    case Op::Var: return p[static_cast<int>(n.var)];
    case Op::Add: return n.a.eval(p) + n.b.eval(p);
    case Op::Mul: return n.a.eval(p) * n.b.eval(p);
    case Op::Pow: {
      const double base = n.a.eval(p);
      if (n.b.is_constant()) {
        const double e = n.b.constant_value();
        if (e == 2.0) return base * base;
        if (e == 1.0) return base;
      }
      return std::pow(base, n.b.eval(p));
    }
    case Op::Sin: return std::sin(n.a.eval(p));
    case Op::Cos: return std::cos(n.a.eval(p));
    case Op::Exp: return std::exp(n.a.eval(p));
    case Op::Log: return std::log(n.a.eval(p));
  }
  return 0.0;
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() + b.constant_value());
  if (a.is_constant() && a.constant_value() == 0.0) return b;
  if (b.is_constant() && b.constant_value() == 0.0) return a;
  return Expr::make(Expr::Op::Add, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.constant_value() * b.constant_value());
  if ((a.is_constant() && a.constant_value() == 0.0) || (b.is_constant() && b.constant_value() == 0.0))
    return Expr::constant(0.0);
  if (a.is_constant() && a.constant_value() == 1.0) return b;
  if (b.is_constant() && b.constant_value() == 1.0) return a;
  if (b.is_constant()) return Expr::make(Expr::Op::Mul, b, a);  // constants first
  return Expr::make(Expr::Op::Mul, a, b);
}

Expr operator-(const Expr& a) { return Expr::constant(-1.0) * a; }
Expr operator-(const Expr& a, const Expr& b) { return a + (-b); }

Expr pow(const Expr& a, const Expr& b) {
  if (b.is_constant()) {
    if (b.constant_value() == 0.0) return Expr::constant(1.0);
    if (b.constant_value() == 1.0) return a;
    if (a.is_constant()) return Expr::constant(std::pow(a.constant_value(), b.constant_value()));
  }
  return Expr::make(Expr::Op::Pow, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_constant()) {
    if (b.constant_value() == 0.0) throw ValidationError("expression: division by zero constant");
    return a * Expr::constant(1.0 / b.constant_value());
  }
  return a * pow(b, Expr::constant(-1.0));
}

Expr sin(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::sin(a.constant_value()));
  return Expr::make(Expr::Op::Sin, a, Expr::constant(0.0));
}
Expr cos(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::cos(a.constant_value()));
  return Expr::make(Expr::Op::Cos, a, Expr::constant(0.0));
}
Expr exp(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::exp(a.constant_value()));
  return Expr::make(Expr::Op::Exp, a, Expr::constant(0.0));
}
Expr log(const Expr& a) {
  if (a.is_constant()) return Expr::constant(std::log(a.constant_value()));
  return Expr::make(Expr::Op::Log, a, Expr::constant(0.0));
}
Expr sqrt(const Expr& a) { return pow(a, Expr::constant(0.5)); }

Expr Expr::diff(Variable v) const {
  const Node& n = *node_;
  switch (n.op) {
    case Op::Const: return constant(0.0);
    case Op::Var: return constant(n.var == v ? 1.0 : 0.0);
    case Op::Add: return n.a.diff(v) + n.b.diff(v);
    case Op::Mul: return n.a.diff(v) * n.b + n.a * n.b.diff(v);
    case Op::Pow: {
      if (n.b.is_constant()) {
        const double e = n.b.constant_value();
        return constant(e) * pow(n.a, constant(e - 1.0)) * n.a.diff(v);
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      return *this * (n.b.diff(v) * log(n.a) + n.b * n.a.diff(v) / n.a);
    }
    case Op::Sin: return cos(n.a) * n.a.diff(v);
    case Op::Cos: return -(sin(n.a) * n.a.diff(v));
    case Op::Exp: return *this * n.a.diff(v);
    case Op::Log: return n.a.diff(v) / n.a;
  }
  return constant(0.0);
}

std::string Expr::str() const {
  const Node& n = *node_;
  std::ostringstream os;
  os.precision(17);
  switch (n.op) {
    case Op::Const: os << n.value; break;
    case Op::Var: os << var_name(n.var); break;
    case Op::Add: os << '(' << n.a.str() << " + " << n.b.str() << ')'; break;
    case Op::Mul: os << n.a.str() << '*' << n.b.str(); break;
    case Op::Pow: os << '(' << n.a.str() << ")^(" << n.b.str() << ')'; break;
    case Op::Sin: os << "sin(" << n.a.str() << ')'; break;
    case Op::Cos: os << "cos(" << n.a.str() << ')'; break;
    case Op::Exp: os << "exp(" << n.a.str() << ')'; break;
    case Op::Log: os << "log(" << n.a.str() << ')'; break;
  }
  return os.str();
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Expr parse() {
    Expr e = expr();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    int line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("expression: " + msg, line, col);
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) e = e / unary();
      else return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) return pow(base, unary());
    return base;
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::string tail(src_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(tail.c_str(), &end);
    if (end == tail.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - tail.c_str());
    return Expr::constant(v);
  }

  Expr name() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string id(src_.substr(start, pos_ - start));
    if (id == "x" || id == "x1") return Expr::var(Variable::X1);
    if (id == "x2") return Expr::var(Variable::X2);
    if (id == "x3") return Expr::var(Variable::X3);
    if (id == "t") return Expr::var(Variable::T);
    if (id == "pi") return Expr::constant(std::numbers::pi);
    if (id == "e") return Expr::constant(std::numbers::e);
    Expr (*fn)(const Expr&) = nullptr;
    if (id == "sin") fn = &sin;
    else if (id == "cos") fn = &cos;
    else if (id == "exp") fn = &exp;
    else if (id == "log") fn = &log;
    else if (id == "sqrt") fn = &sqrt;
    if (!fn) {
      pos_ = start;
      fail("unknown name '" + id + "'");
    }
    if (!accept('(')) fail("expected '(' after " + id);
    Expr arg = expr();
    if (!accept(')')) fail("expected ')'");
    return fn(arg);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expression(std::string_view source) { return Parser(source).parse(); }

}  // namespace mfginv
