// SPDX-License-Identifier: Apache-2.0
//
// Linear parabolic problems on the torus, written in forward form
//
//   d_tau w - Lap w - D(w) = c * (coupling or w) + source,
//   D(w) = div(w b)  (divergence form)  or  b . grad w  (nondivergence form),
//
// with tau = t for forward problems and tau = T - t for backward ones
// (-d_t w - Lap w - D(w) = ..., data at t = T).
//
// Time stepping is first-order exponential Euler: diffusion and the
// constant part of the drift are propagated exactly per Fourier mode; the
// variable drift, potential and source are taken at the left endpoint.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "mfginv/field.hpp"
#include "mfginv/spectral.hpp"

namespace mfginv {

enum class Direction { Forward, Backward };
enum class DriftForm { Divergence, Nondivergence };

struct ParabolicProblem {
  Direction direction = Direction::Forward;
  DriftForm drift_form = DriftForm::Divergence;
  ScalarField data;  // w(0) for forward, w(T) for backward
  TimeGrid time;
  std::array<double, 3> constant_drift{0.0, 0.0, 0.0};
  std::vector<SpaceTimeField> drift;        // variable part of b; empty = none
  std::optional<SpaceTimeField> potential;  // c(x,t)
  std::optional<SpaceTimeField> coupling;   // c multiplies this when set, else w
  std::optional<SpaceTimeField> source;
  bool dealias = false;

  ParabolicProblem(ScalarField data_, TimeGrid time_)
      : data(std::move(data_)), time(time_) {}
};

struct ParabolicSolution {
  SpaceTimeField w;
  double defect = 0.0;  // max over steps of the sup-norm stencil mismatch
};

/// Per-mode exponential Euler factors for the symbol
/// L(xi) = -4 pi^2 |xi|^2 + 2 pi i xi . bbar.
class ExponentialStepper {
 public:
  ExponentialStepper(const SpatialGrid& grid, double dt, const std::array<double, 3>& bbar);

  /// w_hat <- e^{L dt} w_hat + dt phi1(L dt) n_hat
  void step(FourierSpectrum& w_hat, const FourierSpectrum& n_hat) const;
  const SpatialGrid& grid() const noexcept { return grid_; }
  double dt() const noexcept { return dt_; }

 private:
  SpatialGrid grid_;
  double dt_;
  std::vector<std::complex<double>> expo_;
  std::vector<std::complex<double>> phi_;
};

/// Builds the explicit right-hand side in spectrum space. Fluxes enter as
/// 2 pi i xi . flux_hat so the zero mode is never touched.
class ExplicitAccumulator {
 public:
  ExplicitAccumulator(const SpatialGrid& grid, bool dealias) : n_hat_(grid), dealias_(dealias) {}

  void clear();
  void add_scalar(const ScalarField& f);
  void add_divergence(const VectorField& flux);
  const FourierSpectrum& spectrum() const noexcept { return n_hat_; }

 private:
  FourierSpectrum n_hat_;
  bool dealias_;
};

/// Explicit term callback: given the time-node index (in t) of the left
/// endpoint and the current state, accumulate N.
using ExplicitTerm =
    std::function<void(int t_index, const ScalarField& w, const FourierSpectrum& w_hat,
                       ExplicitAccumulator& acc)>;

/// Marches from the data node to the other end and returns w on every t node.
SpaceTimeField exponential_march(const SpatialGrid& grid, const TimeGrid& time, Direction dir,
                                 const ScalarField& data, const std::array<double, 3>& bbar,
                                 bool dealias, const ExplicitTerm& term);

struct StencilDefect {
  double sup = 0.0;
  double l2 = 0.0;  // root mean square over all steps and points
};

/// Mismatch w_{next} - step(w_{prev}) of a given trajectory, over all steps.
StencilDefect exponential_defect(const SpaceTimeField& w, Direction dir,
                          const std::array<double, 3>& bbar, bool dealias,
                          const ExplicitTerm& term);

/// Largest admissible dt for the explicit part: 1/max|b_var|^2 and 1/max|c|.
double stability_limit(const ParabolicProblem& p);

/// Throws StabilityError if dt exceeds stability_limit(p) and
/// DivergenceError on non-finite values.
ParabolicSolution solve_parabolic(const ParabolicProblem& p);

/// The explicit term of a ParabolicProblem, for reuse by defect checks.
ExplicitTerm explicit_term(const ParabolicProblem& p);

struct DuhamelOrder1 {
  ScalarField u1_at_0;
  SpaceTimeField m1;
};

/// Order-1 linearized quantities for the quadratic Hamiltonian, computed in
/// spectrum space. The time integral uses the trapezoidal rule on `time`.
DuhamelOrder1 duhamel_solve_order1(const ScalarField& f1, const SpaceTimeField& F1,
                                   const ScalarField& G1);
DuhamelOrder1 duhamel_solve_order1(const ScalarField& f1, const ScalarField& F1_static,
                                   const ScalarField& G1, const TimeGrid& time);

/// Propagates `trials` nonnegative bumps through d_t - Lap + A . grad up to
/// time t and returns the smallest value seen on any node.
double general_kernel_positivity_probe(const VectorField& A, double t, int trials,
                                       int steps = 256);

}  // namespace mfginv
