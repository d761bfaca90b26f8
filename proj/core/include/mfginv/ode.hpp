// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

namespace mfginv {

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(double t, const OdeState& y, OdeState& dy)>;

struct OdeOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double initial_step = 1e-3;
  double min_step = 1e-14;  // relative to the interval length
  int max_steps = 1000000;
};

struct OdeStats {
  int accepted = 0;
  int rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) from t0 to t1 (either direction).
/// Throws NumericalError on step underflow or step budget exhaustion.
OdeState integrate_dp45(const OdeRhs& f, OdeState y0, double t0, double t1,
                        const OdeOptions& opt = {}, OdeStats* stats = nullptr);

}  // namespace mfginv
