#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mfginv/errors.hpp"
#include "mfginv/expression.hpp"

using namespace mfginv;

TEST(Expression, EvaluatesGrammar) {
  const Expr e = parse_expression("2*x1^2 - sin(pi*t) + exp(0) / 4");
  EXPECT_NEAR(e.eval({1.5, 0, 0, 0.5}), 2 * 2.25 - 1.0 + 0.25, 1e-15);
  EXPECT_NEAR(parse_expression("x").eval({0.3, 0, 0, 0}), 0.3, 0);
  EXPECT_NEAR(parse_expression("sqrt(x2) * log(e)").eval({0, 4.0, 0, 0}), 2.0, 1e-15);
  EXPECT_NEAR(parse_expression("-x3 - -1").eval({0, 0, 2.0, 0}), -1.0, 0);
}

TEST(Expression, ParseErrorCarriesPosition) {
  try {
    parse_expression("1 +\n  sin(x");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_GE(e.column(), 7);
  }
  EXPECT_THROW(parse_expression("foo(x)"), ParseError);
  EXPECT_THROW(parse_expression("x y"), ParseError);
  EXPECT_THROW(parse_expression(""), ParseError);
}

TEST(Expression, SymbolicDerivativesOfKnownForms) {
  const Expr x = Expr::var(Variable::X1), t = Expr::var(Variable::T);
  const Expr u = x * t * (t - Expr::constant(1.0));
  const Expr ut = u.diff(Variable::T);
  for (double tt : {0.0, 0.3, 1.0})
    for (double xx : {-1.0, 0.5, 2.0}) EXPECT_NEAR(ut.eval({xx, 0, 0, tt}), xx * (2 * tt - 1), 1e-15);
  EXPECT_TRUE(u.diff(Variable::X2).is_constant());
  EXPECT_EQ(u.diff(Variable::X2).constant_value(), 0.0);
}

// Property: exact derivatives agree with central differences to O(h^2).
TEST(Expression, DerivativesMatchCentralDifferences) {
  const char* sources[] = {"sin(2*pi*x)*exp(-t)", "x^3*t^2 + cos(x*t)", "log(1 + x^2) * sqrt(1 + t)",
                           "(exp(t) - 1)*sin(x)", "x*t*(t-1)"};
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  for (const char* src : sources) {
    const Expr e = parse_expression(src);
    for (auto v : {Variable::X1, Variable::T}) {
      const Expr d = e.diff(v);
      for (int trial = 0; trial < 20; ++trial) {
        EvalPoint p{u(rng), 0, 0, std::abs(u(rng))};
        const int k = static_cast<int>(v);
        double err_prev = 0.0;
        for (double h : {1e-2, 5e-3}) {
          EvalPoint a = p, b = p;
          a[k] += h;
          b[k] -= h;
          const double fd = (e.eval(a) - e.eval(b)) / (2 * h);
          const double err = std::abs(fd - d.eval(p));
          // second-order: halving h cuts the error by ~4 (or it is at roundoff)
          if (err_prev > 1e-9) {
            EXPECT_LT(err, 0.3 * err_prev) << src;
          }
          err_prev = err;
          EXPECT_LT(err, 50 * h * h * (1 + std::abs(d.eval(p)))) << src;
        }
      }
    }
  }
}

TEST(Expression, StringFormRoundTrips) {
  const Expr e = parse_expression("x^2*sin(t) + 3");
  const Expr back = parse_expression(e.str());
  for (double x : {0.1, 0.7})
    for (double t : {0.2, 0.9}) EXPECT_NEAR(back.eval({x, 0, 0, t}), e.eval({x, 0, 0, t}), 1e-14);
}
