// SPDX-License-Identifier: Apache-2.0
//
// Reconstruction of Taylor coefficients of F and G from linearized
// measurements. A complex probe exp(2 pi i zeta.x) (or a product of k such
// probes, of total frequency s and decay rate r) produces at t = 0
//
//   u_hat(kappa) = F_hat(eta) c(|kappa|^2 + r) + G_hat(eta) exp(-4 pi^2 (|kappa|^2 + r) T),
//
// with eta = kappa - s, so each coefficient is read off one frequency at a time.
#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mfginv/frequency.hpp"
#include "mfginv/linearization.hpp"

namespace mfginv {

enum class CutoffPolicy { Clamp, Strict };

struct ProbePlan {
  std::vector<Wavevector> probes;  // plane-wave frequencies zeta
  int cutoff = 4;                  // Xi, max |xi|_inf recovered
  int time_basis = 1;              // P
  double tikhonov = 0.0;           // lambda
  CutoffPolicy policy = CutoffPolicy::Clamp;
  double condition_threshold = 1e10;
  double division_floor = 1e-3;  // pointwise division by m1(., T)
  double determinant_floor = 1e-14;

  void validate(const SpatialGrid& grid) const;
};

/// u^(zeta)(., 0) keyed by the probe frequency.
using ProbeResponses = std::map<Wavevector, ComplexField>;

struct FrequencyReport {
  Wavevector xi{0, 0, 0};
  int equations = 0;
  double condition = 1.0;
  double residual = 0.0;
  bool refused = false;
};

struct ReconstructionReport {
  std::string target;
  int order = 1;
  std::optional<ScalarField> F;
  std::optional<ScalarField> G;
  std::optional<SpaceTimeField> F_time;
  std::vector<FrequencyReport> frequencies;  // canonical order
  std::vector<Wavevector> refused;
  int cutoff_requested = 0;
  int max_admissible_cutoff = 0;
  double tikhonov = 0.0;
  int time_basis = 0;
  double max_condition = 1.0;
  double amplification_limit = 0.0;
  std::vector<std::string> notes;
};

/// 1 / (100 machine epsilon): ceiling on exp(4 pi^2 |xi|^2 T) in heat inversion.
double amplification_limit();
/// Largest Xi whose worst box frequency obeys the amplification limit.
int max_admissible_cutoff(int dim, double T, double extra_rate = 0.0);

/// Plane-wave synthesizers: exact linear data in spectrum space.
ComplexField synthesize_order1(const ScalarField& F1, const ScalarField& G1,
                               const Wavevector& zeta, double T);
/// Time-dependent F1; the integral is exact for piecewise-linear time dependence.
ComplexField synthesize_order1(const SpaceTimeField& F1, const ScalarField& G1,
                               const Wavevector& zeta);
/// Top-order part only, for a product probe of shift s and rate r.
ComplexField synthesize_plane_response(const ScalarField& Fk, const ScalarField& Gk,
                                       const Wavevector& shift, double rate, double T);

/// int u0(x) w0(x) dx on the grid.
std::complex<double> pairing_datum(const ComplexField& u0, const ComplexField& w0);
/// exp(-2 pi i xi.x): paired with u0 it extracts the xi Fourier coefficient.
ComplexField dual_plane_wave(const SpatialGrid& grid, const Wavevector& xi);

/// G-only recovery; the constant probe (zeta = 0) is preferred if present.
ReconstructionReport recover_G1(const ProbeResponses& data, const ScalarField& known_F1,
                                const ProbePlan& plan, double T);
/// Deconvolution for a general real probe: heat-invert u1(., 0) minus the
/// known F contribution, then divide by m1(., T) where |m1| >= floor.
ReconstructionReport recover_G1_pointwise(const ScalarField& u1_at_0,
                                          const ScalarField& known_F_part,
                                          const ScalarField& m1_at_T, const ProbePlan& plan,
                                          double T);
ReconstructionReport recover_F1_static(const ProbeResponses& data, const ScalarField& known_G1,
                                       const ProbePlan& plan, double T);
/// Cosine-basis moment inversion; output sampled on `out_time`.
ReconstructionReport recover_F1_timedep(const ProbeResponses& data, const ScalarField& known_G1,
                                        const ProbePlan& plan, const TimeGrid& out_time);
ReconstructionReport recover_FG_simultaneous(const ProbeResponses& data, const ProbePlan& plan,
                                             double T);

/// Product of plane-wave probes exp(2 pi i zeta_i . x).
struct ProductProbe {
  std::vector<Wavevector> zetas;
  Wavevector shift() const;
  double rate() const;
  std::string describe(int dim) const;
};

struct LowerOrderCoefficients {
  std::vector<ScalarField> F;  // F^(1)..F^(k-1)
  std::vector<ScalarField> G;  // G^(1)..G^(k-1)
};

enum class HigherOrderTarget { FGivenG, GGivenF, Simultaneous };

/// Order-k measurement with the top-order coefficients set to zero.
using BaselineProvider = std::function<ComplexField(const ProductProbe&)>;

struct OrderKDatum {
  ProductProbe probe;
  ComplexField response;
};

/// Subtracts the baseline from every datum and inverts the top-order term.
/// An empty provider means the lower-order contribution is zero, which is
/// only accepted when every lower coefficient is zero.
ReconstructionReport recover_higher_order(int k, const LowerOrderCoefficients& lower,
                                          const std::vector<OrderKDatum>& data,
                                          const BaselineProvider& baseline,
                                          HigherOrderTarget target,
                                          const std::optional<ScalarField>& known_top,
                                          const ProbePlan& plan, double T);

/// Real-probe measurement of the full-mask order-|probes| response.
using RealMeasure = std::function<ScalarField(const std::vector<ScalarField>&)>;
RealMeasure direct_measure(const MfgConfig& cfg, const LinearizationOptions& opt = {});
RealMeasure fd_measure(const MfgConfig& cfg, double eps, const LinearizationOptions& opt = {});

/// Complex response to a product probe assembled from cos/sin realizations:
/// sum over phase choices of i^{#sin} times the real response.
ComplexField complex_response(const ProductProbe& p, const SpatialGrid& grid,
                              const RealMeasure& measure);

/// Baseline provider running direct solves with the lower coefficients and
/// zeroed top order. Throws if `lower` has fewer than k - 1 entries.
BaselineProvider make_direct_baseline(const MfgConfig& base, const LowerOrderCoefficients& lower,
                                      int k, const LinearizationOptions& opt = {});

struct GramReport {
  double min_singular_value = 0.0;
  double max_singular_value = 0.0;
  int rows = 0;
  int cols = 0;
  std::vector<Wavevector> columns;
  std::vector<std::complex<double>> null_vector;  // right singular vector of the smallest value
};

/// Pairings of band-limited f (|xi|_inf <= cutoff) with the probe heat
/// solutions exp(-4 pi^2 |zeta|^2 t) exp(2 pi i zeta.x) over Q = T^n x (0, T).
GramReport gram_injectivity_check(const std::vector<Wavevector>& probes, int cutoff, double T,
                                  const SpatialGrid& grid);

/// Operator-assembly recovery for general Hamiltonians (A1 != 0): columns
/// are solver responses to a real Fourier basis up to `cutoff`, solved by
/// least squares against the measured u1(., 0) of each probe.
struct GeneralRecovery {
  ScalarField coefficient;
  double condition = 1.0;
  double residual = 0.0;
  int basis_size = 0;
};
GeneralRecovery recover_F1_general(const MfgConfig& cfg_known_G, const std::vector<ScalarField>& probes,
                                   const std::vector<ScalarField>& data, int cutoff,
                                   double tikhonov = 0.0, const LinearizationOptions& opt = {});
GeneralRecovery recover_G1_general(const MfgConfig& cfg_known_F, const std::vector<ScalarField>& probes,
                                   const std::vector<ScalarField>& data, int cutoff,
                                   double tikhonov = 0.0, const LinearizationOptions& opt = {});

/// Zeroes every Fourier mode with |xi|_inf > cutoff.
ScalarField band_limit(const ScalarField& f, int cutoff);

}  // namespace mfginv
