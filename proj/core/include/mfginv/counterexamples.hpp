// SPDX-License-Identifier: Apache-2.0
//
// Cost pairs on the real line that break the zero conditions F(x,t,0) = 0,
// G(x,0) = 0 and still give identical measurements. Everything here is
// checked pointwise on a bounded window with exact symbolic derivatives,
// for the one-dimensional operator
//
//   L u = -u_t - u_xx + |u_x|^2 / 2.
#pragma once

#include <map>
#include <string>
#include <vector>

#include "mfginv/expression.hpp"

namespace mfginv {

/// u(x, t) with its derivatives, all kept symbolic.
struct ClosedFormSolution {
  Expr u;

  explicit ClosedFormSolution(Expr e);
  Expr u_t() const { return u_t_; }
  Expr u_x() const { return u_x_; }
  Expr u_xx() const { return u_xx_; }
  /// L u as an expression.
  Expr apply_operator() const;

 private:
  Expr u_t_, u_x_, u_xx_;
};

struct Window {
  double horizon = 1.0;
  double x_lo = 0.0, x_hi = 1.0;
  double t_lo = 0.0, t_hi = -1.0;  // t_hi < 0 means the horizon
  int nx = 256, nt = 256;
};

struct CounterexampleCheck {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct CounterexampleReport {
  std::string which;
  std::vector<CounterexampleCheck> checks;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> formulas;
  /// Discrepancies between stated and recomputed facts; informational.
  std::vector<std::string> flags;
  std::vector<std::string> notes;

  bool passed() const;
  const CounterexampleCheck& check(const std::string& name) const;
};

/// Sup of |f| over a uniform nx x nt window (end points included).
double window_sup(const Expr& f, const Window& w);

CounterexampleReport verify_running_cost_pair(const Window& w = {});
/// Default window covers a full period in x.
CounterexampleReport verify_terminal_cost_pair(const Window& w = {1.0, 0.0, 6.283185307179586, 0.0, -1.0, 256, 256});

/// Values along the construction at s = t (t - 1) in [-1/4, 0].
struct OdeProfile {
  double p = 0, dp = 0, d2p = 0;
  double q = 0, dq = 0;
  double r2_d2q = 0;  // (1 + 4 s) q''(s); finite at s = -1/4
};

struct TimeIndependentOptions {
  double q_prime0 = 0.0;  // not fixed by the construction
  double t_lo = 0.05, t_hi = 0.95;
  int nt = 257, nx = 65;
  double rtol = 1e-12, atol = 1e-14;
};

class TimeIndependentCounterexample {
 public:
  explicit TimeIndependentCounterexample(const TimeIndependentOptions& opt = {});

  /// Integrates the ODE system from s = 0 to s.
  OdeProfile profile(double s) const;

  double u1(double x, double t) const;
  double u2(double x, double t) const;
  double Lu1(double x, double t) const;
  double Lu2(double x, double t) const;
  double dt_Lu1(double x, double t) const;
  double dt_Lu2(double x, double t) const;

  const TimeIndependentOptions& options() const { return opt_; }

 private:
  TimeIndependentOptions opt_;
};

/// Builds the construction (T = 1) and reports which sub-conditions hold.
CounterexampleReport build_time_independent_counterexample(const TimeIndependentOptions& opt = {});

}  // namespace mfginv
