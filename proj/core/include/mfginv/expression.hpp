// SPDX-License-Identifier: Apache-2.0
//
// Closed-form expressions in x1..x3 and t with exact symbolic derivatives.
//
// Grammar (whitespace and newlines ignored):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | name | func '(' expr ')' | '(' expr ')'
//   name    := x | x1 | x2 | x3 | t | pi | e
//   func    := sin | cos | exp | log | sqrt
#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>

namespace mfginv {

enum class Variable { X1 = 0, X2 = 1, X3 = 2, T = 3 };

/// Evaluation point (x1, x2, x3, t).
using EvalPoint = std::array<double, 4>;

class Expr {
 public:
  enum class Op { Const, Var, Add, Mul, Pow, Sin, Cos, Exp, Log };

  Expr();  // the constant 0
  static Expr constant(double c);
  static Expr var(Variable v);

  double eval(const EvalPoint& p) const;
  /// Exact derivative with light algebraic simplification.
  Expr diff(Variable v) const;
  std::string str() const;

  bool is_constant() const;
  double constant_value() const;  // only meaningful if is_constant()
  Op op() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr pow(const Expr& a, const Expr& b);
  friend Expr sin(const Expr& a);
  friend Expr cos(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr log(const Expr& a);
  friend Expr sqrt(const Expr& a);

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Op op, Expr a, Expr b);
  std::shared_ptr<const Node> node_;
};

Expr pow(const Expr& a, const Expr& b);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

/// Throws ParseError with the 1-based line and column of the offending token.
Expr parse_expression(std::string_view source);

}  // namespace mfginv
