// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "mfginv/field.hpp"

namespace mfginv {

enum class CostKind { Running, RunningStatic, Terminal };

/// U(x,[t,]z) = sum_{k=1..K} U^(k)(x[,t]) z^k / k!. There is no k = 0 term,
/// so U(., 0) = 0 holds by construction.
class TaylorCost {
 public:
  static TaylorCost terminal(std::vector<ScalarField> coeffs, double radius_hint = 1.0);
  static TaylorCost running_static(std::vector<ScalarField> coeffs, double radius_hint = 1.0);
  static TaylorCost running(std::vector<SpaceTimeField> coeffs, double radius_hint = 1.0);
  /// Order-1 cost with a zero coefficient; used for F = 0 or G = 0.
  static TaylorCost zero(CostKind kind, const SpatialGrid& grid);

  CostKind kind() const noexcept { return kind_; }
  int order() const noexcept { return order_; }
  const SpatialGrid& grid() const noexcept { return grid_; }
  double radius_hint() const noexcept { return radius_; }
  bool time_dependent() const noexcept { return kind_ == CostKind::Running; }

  /// Coefficient U^(k) at time node t_index (ignored for static kinds).
  /// Orders above K return a zero field.
  ScalarField coefficient(int k, int t_index = 0) const;
  /// U^(k)(., t) with linear interpolation between time nodes.
  ScalarField coefficient_at(int k, double t) const;
  /// Whole coefficient as space-time data (static kinds are broadcast).
  SpaceTimeField coefficient_spacetime(int k, const TimeGrid& time) const;

  const std::optional<TimeGrid>& time() const noexcept { return time_; }

  /// Returns a copy with U^(k) replaced (k may extend the order by one or more).
  TaylorCost with_coefficient(int k, const ScalarField& c) const;
  TaylorCost with_coefficient(int k, const SpaceTimeField& c) const;

  /// Sup norm of U^(k) over all nodes.
  double coefficient_sup(int k) const;

 private:
  TaylorCost(CostKind kind, SpatialGrid grid) : kind_(kind), grid_(grid) {}

  CostKind kind_;
  SpatialGrid grid_;
  std::optional<TimeGrid> time_;
  int order_ = 0;
  double radius_ = 1.0;
  std::vector<ScalarField> static_;
  std::vector<SpaceTimeField> running_;
};

/// Pointwise sum U^(k) z^k / k!. t_index is required for time-dependent costs
/// and rejected for terminal ones.
ScalarField cost_eval(const TaylorCost& c, const ScalarField& z,
                      std::optional<int> t_index = std::nullopt);

/// k!/R^k * sup_norm: the Cauchy-estimate ceiling for |U^(k)| on a disk of radius R.
double cauchy_bound(double sup_norm, double radius, int k);

struct CauchyCheck {
  std::vector<double> coefficient_sup;  // index k-1
  std::vector<double> bound;            // index k-1
  bool consistent = true;
};

/// Compares every stored |U^(k)| with cauchy_bound(sup_on_disk, R, k).
CauchyCheck check_cauchy_consistency(const TaylorCost& c, double sup_on_disk, double radius);

}  // namespace mfginv
