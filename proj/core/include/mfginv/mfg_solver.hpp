// SPDX-License-Identifier: Apache-2.0
//
// Forward solver for the coupled system
//
//   -d_t u - Lap u + H(x, grad u) = F(x, t, m),     u(T) = G(x, m(T)),
//    d_t m - Lap m - div(m H_p(x, grad u)) = 0,     m(0) = m0,
//
// by relaxed Picard iteration on m.
#pragma once

#include <optional>
#include <vector>

#include "mfginv/hamiltonian.hpp"
#include "mfginv/parabolic.hpp"
#include "mfginv/taylor_cost.hpp"

namespace mfginv {

struct PicardOptions {
  int max_iters = 200;
  double relaxation = 0.5;  // theta in (0, 1]
  double tolerance = 1e-10;  // on sup |m_{k+1} - m_k|
};

struct MfgConfig {
  TaylorCost F;  // running or running-static
  TaylorCost G;  // terminal
  HamiltonianSeries H;
  TimeGrid time;
  PicardOptions picard{};
  double smallness = 0.05;  // delta for the small-data regime, sup norm of m0
  bool dealias = true;

  const SpatialGrid& grid() const noexcept { return F.grid(); }
  /// Throws ValidationError naming the offending field.
  void validate() const;
};

struct MfgResiduals {
  double hjb = 0.0;
  double fp = 0.0;
  double terminal = 0.0;
  double initial = 0.0;
  double hjb_l2 = 0.0;
  double fp_l2 = 0.0;
};

struct MfgSolution {
  SpaceTimeField u;
  SpaceTimeField m;
  int iterations = 0;
  std::vector<double> update_norms;        // sup |m_{k+1} - m_k| per sweep
  std::vector<double> contraction_ratios;  // successive update-norm ratios
  MfgResiduals residuals;
  double norm_ratio = 0.0;  // max(|u|, |m|) / |m0| in sup norm, 0 for m0 = 0
  bool small_data = true;   // |m0| <= smallness
};

/// HJB solve for a given density history.
SpaceTimeField solve_hjb(const MfgConfig& cfg, const SpaceTimeField& m);
/// FP solve for a given value function.
SpaceTimeField solve_fp(const MfgConfig& cfg, const SpaceTimeField& u, const ScalarField& m0);

/// Throws NoConvergenceError past max_iters and DivergenceError on blow-up.
MfgSolution solve_mfg(const MfgConfig& cfg, const ScalarField& m0);
/// u(., 0) of the converged solution.
ScalarField measure(const MfgConfig& cfg, const ScalarField& m0);
/// Recomputes all defects of (u, m) with the solver's stencil.
MfgResiduals residual_check(const SpaceTimeField& u, const SpaceTimeField& m,
                            const ScalarField& m0, const MfgConfig& cfg);
MfgResiduals residual_check(const MfgSolution& sol, const MfgConfig& cfg);

}  // namespace mfginv
