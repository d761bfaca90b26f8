// SPDX-License-Identifier: Apache-2.0
#include "mfginv/taylor_cost.hpp"

#include <algorithm>
#include <cmath>

namespace mfginv {
namespace {

void check_radius(double r) {
  if (!(r > 0.0)) throw ValidationError("cost: convergence radius hint must be positive");
}

}  // namespace

TaylorCost TaylorCost::terminal(std::vector<ScalarField> coeffs, double radius_hint) {
  if (coeffs.empty()) throw ValidationError("cost: at least one coefficient required");
  check_radius(radius_hint);
  TaylorCost c(CostKind::Terminal, coeffs.front().grid());
  for (const auto& f : coeffs) require_same_grid(c.grid_, f.grid(), "terminal cost");
  c.order_ = static_cast<int>(coeffs.size());
  c.radius_ = radius_hint;
  c.static_ = std::move(coeffs);
  return c;
}

TaylorCost TaylorCost::running_static(std::vector<ScalarField> coeffs, double radius_hint) {
  TaylorCost c = terminal(std::move(coeffs), radius_hint);
  c.kind_ = CostKind::RunningStatic;
  return c;
}

TaylorCost TaylorCost::running(std::vector<SpaceTimeField> coeffs, double radius_hint) {
  if (coeffs.empty()) throw ValidationError("cost: at least one coefficient required");
  check_radius(radius_hint);
  TaylorCost c(CostKind::Running, coeffs.front().grid());
  c.time_ = coeffs.front().time();
  for (const auto& f : coeffs) {
    require_same_grid(c.grid_, f.grid(), "running cost");
    if (!(f.time() == *c.time_)) throw ValidationError("running cost: time grid mismatch");
  }
  c.order_ = static_cast<int>(coeffs.size());
  c.radius_ = radius_hint;
  c.running_ = std::move(coeffs);
  return c;
}

TaylorCost TaylorCost::zero(CostKind kind, const SpatialGrid& grid) {
  if (kind == CostKind::Running)
    throw ValidationError("cost: zero running cost needs a time grid; use RunningStatic");
  TaylorCost c = terminal({ScalarField(grid)});
  c.kind_ = kind;
  return c;
}

ScalarField TaylorCost::coefficient(int k, int t_index) const {
  if (k < 1) throw ValidationError("cost: coefficient order must be >= 1");
  if (k > order_) return ScalarField(grid_);
  if (kind_ == CostKind::Running) return running_[static_cast<std::size_t>(k - 1)].slice(t_index);
  return static_[static_cast<std::size_t>(k - 1)];
}

ScalarField TaylorCost::coefficient_at(int k, double t) const {
  if (kind_ != CostKind::Running || k > order_) return coefficient(k);
  const TimeGrid& tg = *time_;
  const double s = std::clamp(t / tg.dt(), 0.0, static_cast<double>(tg.steps()));
  const int k0 = std::min(static_cast<int>(std::floor(s)), tg.steps() - 1);
  const double w = s - k0;
  const auto& f = running_[static_cast<std::size_t>(k - 1)];
  ScalarField out = f.slice(k0);
  out *= (1.0 - w);
  out.axpy(w, f.slice(k0 + 1));
  return out;
}

SpaceTimeField TaylorCost::coefficient_spacetime(int k, const TimeGrid& time) const {
  if (kind_ == CostKind::Running && k <= order_ && time == *time_)
    return running_[static_cast<std::size_t>(k - 1)];
  SpaceTimeField out(grid_, time);
  for (int j = 0; j < time.nodes(); ++j) out.set_slice(j, coefficient_at(k, time.node(j)));
  return out;
}

TaylorCost TaylorCost::with_coefficient(int k, const ScalarField& c) const {
  if (k < 1) throw ValidationError("cost: coefficient order must be >= 1");
  require_same_grid(grid_, c.grid(), "with_coefficient");
  TaylorCost out = *this;
  if (kind_ == CostKind::Running) {
    SpaceTimeField st(grid_, *time_);
    for (int j = 0; j < time_->nodes(); ++j) st.set_slice(j, c);
    return with_coefficient(k, st);
  }
  while (out.order_ < k) {
    out.static_.emplace_back(grid_);
    ++out.order_;
  }
  out.static_[static_cast<std::size_t>(k - 1)] = c;
  return out;
}

TaylorCost TaylorCost::with_coefficient(int k, const SpaceTimeField& c) const {
  if (kind_ != CostKind::Running)
    throw ValidationError("cost: space-time coefficient on a static cost");
  if (k < 1) throw ValidationError("cost: coefficient order must be >= 1");
  TaylorCost out = *this;
  while (out.order_ < k) {
    out.running_.emplace_back(grid_, *time_);
    ++out.order_;
  }
  out.running_[static_cast<std::size_t>(k - 1)] = c;
  return out;
}

double TaylorCost::coefficient_sup(int k) const {
  if (k < 1 || k > order_) return 0.0;
  if (kind_ == CostKind::Running) return running_[static_cast<std::size_t>(k - 1)].sup_norm();
  return static_[static_cast<std::size_t>(k - 1)].sup_norm();
}

ScalarField cost_eval(const TaylorCost& c, const ScalarField& z, std::optional<int> t_index) {
  require_same_grid(c.grid(), z.grid(), "cost_eval");
  if (c.kind() == CostKind::Terminal && t_index)
    throw ValidationError("cost_eval: terminal cost takes no time index");
  if (c.kind() == CostKind::Running) {
    if (!t_index) throw ValidationError("cost_eval: running cost requires a time index");
    if (*t_index < 0 || *t_index > c.time()->steps())
      throw ValidationError("cost_eval: time index out of range");
  }
  const int t = t_index.value_or(0);
  const int order = c.order();
  // Horner: z (U1 + z/2 (U2 + z/3 (U3 + ...)))
  ScalarField acc = c.coefficient(order, t);
  for (int k = order - 1; k >= 1; --k) {
    const ScalarField uk = c.coefficient(k, t);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = uk[i] + z[i] / (k + 1) * acc[i];
  }
  acc.multiply(z);
  return acc;
}

double cauchy_bound(double sup_norm, double radius, int k) {
  if (!(radius > 0.0)) throw ValidationError("cauchy_bound: radius must be positive");
  if (k < 1) throw ValidationError("cauchy_bound: k must be >= 1");
  double f = sup_norm;
  for (int i = 1; i <= k; ++i) f *= i / radius;
  return f;
}

CauchyCheck check_cauchy_consistency(const TaylorCost& c, double sup_on_disk, double radius) {
  CauchyCheck out;
  for (int k = 1; k <= c.order(); ++k) {
    const double s = c.coefficient_sup(k);
    const double b = cauchy_bound(sup_on_disk, radius, k);
    out.coefficient_sup.push_back(s);
    out.bound.push_back(b);
    if (s > b * (1.0 + 1e-12)) out.consistent = false;
  }
  return out;
}

}  // namespace mfginv
