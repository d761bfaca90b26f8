// SPDX-License-Identifier: Apache-2.0
//
// Mixed derivatives of the solution map eps -> (u, m) at m0 = 0 with
// m0 = sum_l eps_l f_l. Results are keyed by a bitmask over the probe list:
// bit l set means d/d eps_l was taken.
#pragma once

#include <map>
#include <optional>
#include <vector>

#include "mfginv/mfg_solver.hpp"

namespace mfginv {

enum class ProbeMode { PlaneWave, Constant, Custom };
enum class ProbePhase { Cos, Sin };

struct ProbeSpec {
  ProbeMode mode = ProbeMode::Constant;
  Wavevector zeta{0, 0, 0};
  ProbePhase phase = ProbePhase::Cos;
  std::optional<ScalarField> custom;
  double amplitude = 1.0;

  static ProbeSpec plane_wave(const Wavevector& zeta, ProbePhase phase = ProbePhase::Cos);
  static ProbeSpec constant();
  static ProbeSpec from_field(ScalarField f);

  /// Samples the probe; custom fields are normalized to sup norm 1.
  ScalarField realize(const SpatialGrid& grid) const;
  std::string describe(int dim) const;
};

enum class LinearizationMethod { FiniteDifference, Direct };

struct LinearizationResult {
  int order = 1;
  LinearizationMethod method = LinearizationMethod::Direct;
  double epsilon = 0.0;  // FD only
  std::map<unsigned, SpaceTimeField> u;
  std::map<unsigned, SpaceTimeField> m;

  /// u_S(., 0) for the probe subset `mask`.
  ScalarField measurement(unsigned mask) const;
};

struct LinearizationOptions {
  bool dealias = false;
  int threads = 1;
  double corner_tolerance = 1e-13;  // Picard tolerance for FD corners
  int corner_max_iters = 1000;
};

LinearizationResult linearize_direct_order1(const MfgConfig& cfg, const ProbeSpec& f1,
                                            const LinearizationOptions& opt = {});
/// `first_order` must hold masks 1 and 2 for (f1, f2); it is reused as is.
LinearizationResult linearize_direct_order2(const MfgConfig& cfg, const ProbeSpec& f1,
                                            const ProbeSpec& f2,
                                            const LinearizationResult& first_order,
                                            const LinearizationOptions& opt = {});
/// All subsets of the probe list up to |S| = order, by the set-partition recursion.
LinearizationResult linearize_direct(const MfgConfig& cfg, const std::vector<ScalarField>& probes,
                                     int order, const LinearizationOptions& opt = {});

/// Order 1: each probe separately, (S(eps f) - S(0)) / eps.
/// Order k >= 2: exactly k probes; inclusion-exclusion over all corners, every
/// subset mask is returned. S(0) = 0 is used without solving.
LinearizationResult fd_extract(const MfgConfig& cfg, const std::vector<ScalarField>& probes,
                               int order, double eps, const LinearizationOptions& opt = {});

struct CrossValidation {
  double epsilon = 0.0;
  double discrepancy = 0.0;  // sup |u1_fd - u1_direct|
  int halvings = 0;
  bool passed = false;
  LinearizationResult fd;
  LinearizationResult direct;
};

/// Order-1 FD/direct comparison; halves eps while discrepancy > multiple * eps.
CrossValidation cross_validate_order1(const MfgConfig& cfg, const ScalarField& probe,
                                      double eps = 1e-3, double multiple = 100.0,
                                      int max_halvings = 4, const LinearizationOptions& opt = {});

/// Visits the set partitions of `mask` in a fixed order; each partition is a
/// list of disjoint nonempty blocks ordered by their lowest bit.
void for_each_partition(unsigned mask, const std::function<void(const std::vector<unsigned>&)>& fn);

}  // namespace mfginv
