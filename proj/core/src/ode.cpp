// SPDX-License-Identifier: Apache-2.0
#include "mfginv/ode.hpp"

#include <algorithm>
#include <cmath>

#include "mfginv/errors.hpp"

namespace mfginv {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeState integrate_dp45(const OdeRhs& f, OdeState y, double t0, double t1, const OdeOptions& opt,
                        OdeStats* stats) {
  const double span = t1 - t0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;
  const std::size_t n = y.size();
  const double hmin = opt.min_step * std::abs(span);
  double h = std::min(opt.initial_step, std::abs(span));
  double t = t0;
  OdeState k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y5(n);
  f(t, y, k1);
  int steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > opt.max_steps) throw NumericalError("ode: step budget exhausted");
    h = std::min(h, std::abs(t1 - t));
    const double hs = dir * h;
    auto stage = [&](OdeState& out, std::initializer_list<std::pair<double, const OdeState*>> terms,
                     double c) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = y[i];
        for (const auto& [a, k] : terms) acc += hs * a * (*k)[i];
        tmp[i] = acc;
      }
      f(t + c * hs, tmp, out);
    };
    stage(k2, {{a21, &k1}}, c2);
    stage(k3, {{a31, &k1}, {a32, &k2}}, c3);
    stage(k4, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, c4);
    stage(k5, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, c5);
    stage(k6, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, 1.0);
    for (std::size_t i = 0; i < n; ++i)
      y5[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + hs, y5, k7);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei =
          hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
      err = std::max(err, std::abs(ei) / sc);
    }
    if (!std::isfinite(err)) throw NumericalError("ode: non-finite state");
    if (err <= 1.0) {
      t = (std::abs(t1 - t) <= h) ? t1 : t + hs;
      y = y5;
      k1 = k7;  // first-same-as-last
      if (stats) ++stats->accepted;
    } else if (stats) {
      ++stats->rejected;
    }
    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
    if (h < hmin && dir * (t1 - t) > 0.0) throw NumericalError("ode: step size underflow");
  }
  return y;
}

}  // namespace mfginv
