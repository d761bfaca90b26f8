// SPDX-License-Identifier: Apache-2.0
#include "mfginv/recovery.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "mfginv/errors.hpp"
#include "mfginv/spectral.hpp"

namespace mfginv {

using cplx = std::complex<double>;

namespace {

constexpr double kFourPi2 = 4.0 * std::numbers::pi * std::numbers::pi;

double decay(double K, double T) { return std::exp(-kFourPi2 * K * T); }

struct Observation {
  Wavevector shift{0, 0, 0};
  double rate = 0.0;
  FourierSpectrum residual;
};

std::vector<Observation> order1_observations(const ProbeResponses& data, const ProbePlan& plan,
                                             const SpatialGrid& grid) {
  std::vector<Observation> obs;
  for (const auto& z : plan.probes) {
    auto it = data.find(z);
    if (it == data.end())
      throw ValidationError("recovery: no measurement for probe " + to_string(z, grid.dim()));
    require_same_grid(grid, it->second.grid(), "probe response");
    obs.push_back({z, static_cast<double>(norm2(z)), dft_forward(it->second)});
  }
  return obs;
}

const SpatialGrid& grid_of(const ProbeResponses& data) {
  if (data.empty()) throw ValidationError("recovery: no measurements supplied");
  return data.begin()->second.grid();
}

ReconstructionReport base_report(const char* target, const ProbePlan& plan, int dim, double T,
                                 double rate = 0.0) {
  ReconstructionReport r;
  r.target = target;
  r.cutoff_requested = plan.cutoff;
  r.tikhonov = plan.tikhonov;
  r.time_basis = plan.time_basis;
  r.amplification_limit = amplification_limit();
  r.max_admissible_cutoff = max_admissible_cutoff(dim, T, rate);
  return r;
}

void check_strict(const ProbePlan& plan, const ReconstructionReport& r) {
  if (plan.policy == CutoffPolicy::Strict && plan.cutoff > r.max_admissible_cutoff)
    throw CutoffTooAggressive("cutoff " + std::to_string(plan.cutoff) +
                                  " needs heat amplification above the guard; max admissible is " +
                                  std::to_string(r.max_admissible_cutoff),
                              r.max_admissible_cutoff);
}

void finish_condition(ReconstructionReport& r) {
  for (const auto& f : r.frequencies) r.max_condition = std::max(r.max_condition, f.condition);
}

// F given G. Weighted least squares over every observation reaching eta.
ScalarField invert_F(const std::vector<Observation>& obs, const std::optional<FourierSpectrum>& G_hat,
                     const ProbePlan& plan, double T, const SpatialGrid& grid,
                     ReconstructionReport& rep) {
  FourierSpectrum out(grid);
  std::vector<Wavevector> missing;
  for (const auto& eta : frequency_box(grid.dim(), plan.cutoff)) {
    double cc = 0.0;
    cplx cd = 0.0;
    std::vector<std::pair<double, cplx>> rows;
    for (const auto& o : obs) {
      const Wavevector kappa = eta + o.shift;
      if (!grid.resolves(kappa)) continue;
      const double K = static_cast<double>(norm2(kappa)) + o.rate;
      const double c = duhamel_weight(K, T);
      cplx d = o.residual.at(kappa);
      if (G_hat) d -= G_hat->at(eta) * decay(K, T);
      rows.emplace_back(c, d);
      cc += c * c;
      cd += c * d;
    }
    FrequencyReport fr;
    fr.xi = eta;
    fr.equations = static_cast<int>(rows.size());
    if (rows.empty()) {
      missing.push_back(eta);
      continue;
    }
    const cplx a = cd / cc;
    double res = 0.0;
    for (const auto& [c, d] : rows) res += std::norm(d - c * a);
    fr.residual = std::sqrt(res);
    out.at(eta) = a;
    rep.frequencies.push_back(fr);
  }
  if (!missing.empty())
    throw InsufficientProbes("recovery: " + std::to_string(missing.size()) +
                                 " target frequencies are reached by no probe",
                             missing);
  return dft_inverse_real(out);
}

// G given F. Least squares weighted by the decay factor; refused where even
// the best observation needs more amplification than the guard allows.
ScalarField invert_G(const std::vector<Observation>& obs, const std::optional<FourierSpectrum>& F_hat,
                     const ProbePlan& plan, double T, const SpatialGrid& grid,
                     ReconstructionReport& rep) {
  FourierSpectrum out(grid);
  std::vector<Wavevector> missing;
  const double limit = amplification_limit();
  for (const auto& eta : frequency_box(grid.dim(), plan.cutoff)) {
    double ee = 0.0;
    cplx ed = 0.0;
    std::vector<std::pair<double, cplx>> rows;
    for (const auto& o : obs) {
      const Wavevector kappa = eta + o.shift;
      if (!grid.resolves(kappa)) continue;
      const double K = static_cast<double>(norm2(kappa)) + o.rate;
      const double e = decay(K, T);
      cplx d = o.residual.at(kappa);
      if (F_hat) d -= F_hat->at(eta) * duhamel_weight(K, T);
      rows.emplace_back(e, d);
      ee += e * e;
      ed += e * d;
    }
    FrequencyReport fr;
    fr.xi = eta;
    fr.equations = static_cast<int>(rows.size());
    if (rows.empty()) {
      missing.push_back(eta);
      continue;
    }
    const double amplification = 1.0 / std::sqrt(ee);
    fr.condition = amplification;
    if (!(amplification <= limit)) {
      fr.refused = true;
      rep.refused.push_back(eta);
      rep.frequencies.push_back(fr);
      continue;
    }
    const cplx b = ed / ee;
    double res = 0.0;
    for (const auto& [e, d] : rows) res += std::norm(d - e * b);
    fr.residual = std::sqrt(res);
    out.at(eta) = b;
    rep.frequencies.push_back(fr);
  }
  if (!missing.empty())
    throw InsufficientProbes("recovery: " + std::to_string(missing.size()) +
                                 " target frequencies are reached by no probe",
                             missing);
  if (!rep.refused.empty())
    rep.notes.push_back(std::to_string(rep.refused.size()) +
                        " frequencies refused by the amplification guard and set to zero");
  return dft_inverse_real(out);
}

double cond2(double a, double b, double c, double d) {
  Eigen::Matrix2d m;
  m << a, b, c, d;
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(m);
  const auto s = svd.singularValues();
  return s(1) > 0.0 ? s(0) / s(1) : std::numeric_limits<double>::infinity();
}

struct TwoByTwo {
  cplx a, b;
  double det;
  double condition;
  bool refused;
};

TwoByTwo solve_pair(double S, double Sp, cplx d, cplx dp, double T, double det_floor) {
  const double c1 = duhamel_weight(S, T), e1 = decay(S, T);
  const double c2 = duhamel_weight(Sp, T), e2 = decay(Sp, T);
  const double det = c1 * e2 - c2 * e1;
  TwoByTwo r{0.0, 0.0, det, cond2(c1, e1, c2, e2), false};
  if (!(std::abs(det) >= det_floor)) {
    // G is invisible at this rate; keep the rank-one fit for F.
    r.refused = true;
    r.a = (c1 * d + c2 * dp) / (c1 * c1 + c2 * c2);
    return r;
  }
  r.a = (e2 * d - e1 * dp) / det;
  r.b = (c1 * dp - c2 * d) / det;
  return r;
}

}  // namespace

void ProbePlan::validate(const SpatialGrid& grid) const {
  if (cutoff < 0) throw ValidationError("cutoff: must be >= 0");
  if (2 * cutoff >= grid.points_per_axis())
    throw ValidationError("cutoff: must be below N/2 = " + std::to_string(grid.points_per_axis() / 2));
  if (time_basis < 1) throw ValidationError("time_basis: must be >= 1");
  if (!(tikhonov >= 0.0)) throw ValidationError("lambda: must be >= 0");
  for (const auto& z : probes)
    if (!grid.resolves(z))
      throw ValidationError("probes: " + to_string(z, grid.dim()) + " is not below Nyquist");
}

double amplification_limit() { return 1.0 / (100.0 * DBL_EPSILON); }

int max_admissible_cutoff(int dim, double T, double extra_rate) {
  const double limit_rate = std::log(amplification_limit()) / (kFourPi2 * T);
  int xi = -1;
  while (dim * static_cast<double>(xi + 1) * (xi + 1) + extra_rate <= limit_rate) ++xi;
  return std::max(xi, 0);
}

ComplexField synthesize_plane_response(const ScalarField& Fk, const ScalarField& Gk,
                                       const Wavevector& shift, double rate, double T) {
  const auto& g = Fk.grid();
  require_same_grid(g, Gk.grid(), "synthesize");
  const FourierSpectrum Fh = dft_forward(Fk), Gh = dft_forward(Gk);
  FourierSpectrum out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Wavevector eta = g.frequency(i);
    if (!g.resolves(eta)) continue;
    const Wavevector kappa = eta + shift;
    if (!g.resolves(kappa)) continue;
    const double K = static_cast<double>(norm2(kappa)) + rate;
    out.at(kappa) += Fh[i] * duhamel_weight(K, T) + Gh[i] * decay(K, T);
  }
  return dft_inverse(out);
}

ComplexField synthesize_order1(const ScalarField& F1, const ScalarField& G1, const Wavevector& zeta,
                               double T) {
  return synthesize_plane_response(F1, G1, zeta, static_cast<double>(norm2(zeta)), T);
}

ComplexField synthesize_order1(const SpaceTimeField& F1, const ScalarField& G1,
                               const Wavevector& zeta) {
  const auto& g = F1.grid();
  const TimeGrid& tg = F1.time();
  const double T = tg.horizon(), h = tg.dt();
  std::vector<FourierSpectrum> Fh;
  for (int k = 0; k < tg.nodes(); ++k) Fh.push_back(dft_forward(F1.slice(k)));
  const FourierSpectrum Gh = dft_forward(G1);
  const double rate = static_cast<double>(norm2(zeta));
  FourierSpectrum out(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Wavevector eta = g.frequency(i);
    if (!g.resolves(eta)) continue;
    const Wavevector kappa = eta + zeta;
    if (!g.resolves(kappa)) continue;
    const double K = static_cast<double>(norm2(kappa)) + rate;
    const double lam = kFourPi2 * K;
    const double i0 = exp_integral0(lam, h), i1 = exp_integral1(lam, h);
    cplx acc = 0.0;
    for (int k = 0; k < tg.steps(); ++k) {
      const double w = std::exp(-lam * tg.node(k));
      acc += w * (Fh[static_cast<std::size_t>(k)][i] * i0 +
                  (Fh[static_cast<std::size_t>(k + 1)][i] - Fh[static_cast<std::size_t>(k)][i]) / h * i1);
    }
    out.at(kappa) += acc + Gh[i] * decay(K, T);
  }
  return dft_inverse(out);
}

cplx pairing_datum(const ComplexField& u0, const ComplexField& w0) {
  require_same_grid(u0.grid(), w0.grid(), "pairing");
  cplx s = 0.0;
  for (std::size_t i = 0; i < u0.size(); ++i) s += u0[i] * w0[i];
  return s / static_cast<double>(u0.size());
}

ComplexField dual_plane_wave(const SpatialGrid& grid, const Wavevector& xi) {
  const double two_pi = 2.0 * std::numbers::pi;
  return ComplexField::sample(grid, [&](const std::array<double, 3>& x) {
    double ph = 0.0;
    for (int j = 0; j < grid.dim(); ++j) ph += xi[j] * x[j];
    return std::polar(1.0, -two_pi * ph);
  });
}

ScalarField band_limit(const ScalarField& f, int cutoff) {
  FourierSpectrum s = dft_forward(f);
  for (std::size_t i = 0; i < s.size(); ++i)
    if (norm_inf(s.frequency(i)) > cutoff) s[i] = 0.0;
  return dft_inverse_real(s);
}

ReconstructionReport recover_G1(const ProbeResponses& data, const ScalarField& known_F1,
                                const ProbePlan& plan, double T) {
  const auto& grid = grid_of(data);
  plan.validate(grid);
  ReconstructionReport rep = base_report("G1", plan, grid.dim(), T);
  check_strict(plan, rep);
  ProbePlan p = plan;
  // The constant probe alone gives the best-conditioned deconvolution.
  if (std::find(p.probes.begin(), p.probes.end(), Wavevector{0, 0, 0}) != p.probes.end())
    p.probes = {Wavevector{0, 0, 0}};
  const auto obs = order1_observations(data, p, grid);
  rep.G = invert_G(obs, dft_forward(known_F1), plan, T, grid, rep);
  finish_condition(rep);
  return rep;
}

ReconstructionReport recover_G1_pointwise(const ScalarField& u1_at_0, const ScalarField& known_F_part,
                                          const ScalarField& m1_at_T, const ProbePlan& plan,
                                          double T) {
  const auto& grid = u1_at_0.grid();
  plan.validate(grid);
  ReconstructionReport rep = base_report("G1", plan, grid.dim(), T);
  check_strict(plan, rep);
  FourierSpectrum r = dft_forward(u1_at_0 - known_F_part);
  const double limit = amplification_limit();
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Wavevector xi = r.frequency(i);
    if (norm_inf(xi) > plan.cutoff) {
      r[i] = 0.0;
      continue;
    }
    const double amp = 1.0 / decay(static_cast<double>(norm2(xi)), T);
    FrequencyReport fr;
    fr.xi = xi;
    fr.equations = 1;
    fr.condition = amp;
    if (!(amp <= limit)) {
      fr.refused = true;
      rep.refused.push_back(xi);
      r[i] = 0.0;
    } else {
      r[i] *= amp;
    }
    rep.frequencies.push_back(fr);
  }
  ScalarField gm = dft_inverse_real(r);
  int masked = 0;
  for (std::size_t i = 0; i < gm.size(); ++i) {
    if (std::abs(m1_at_T[i]) >= plan.division_floor) {
      gm[i] /= m1_at_T[i];
    } else {
      gm[i] = 0.0;
      ++masked;
    }
  }
  if (masked) rep.notes.push_back(std::to_string(masked) + " grid points masked: |m1(x,T)| below floor");
  rep.G = std::move(gm);
  finish_condition(rep);
  return rep;
}

ReconstructionReport recover_F1_static(const ProbeResponses& data, const ScalarField& known_G1,
                                       const ProbePlan& plan, double T) {
  const auto& grid = grid_of(data);
  plan.validate(grid);
  ReconstructionReport rep = base_report("F1", plan, grid.dim(), T);
  const auto obs = order1_observations(data, plan, grid);
  rep.F = invert_F(obs, dft_forward(known_G1), plan, T, grid, rep);
  finish_condition(rep);
  return rep;
}

ReconstructionReport recover_F1_timedep(const ProbeResponses& data, const ScalarField& known_G1,
                                        const ProbePlan& plan, const TimeGrid& out_time) {
  const auto& grid = grid_of(data);
  plan.validate(grid);
  const double T = out_time.horizon();
  ReconstructionReport rep = base_report("F1(t)", plan, grid.dim(), T);
  const auto obs = order1_observations(data, plan, grid);
  const FourierSpectrum Gh = dft_forward(known_G1);
  const int P = plan.time_basis;

  std::vector<FourierSpectrum> slices(static_cast<std::size_t>(out_time.nodes()), FourierSpectrum(grid));
  std::vector<Wavevector> missing;
  for (const auto& eta : frequency_box(grid.dim(), plan.cutoff)) {
    std::vector<double> rates;
    std::vector<cplx> rhs;
    for (const auto& o : obs) {
      const Wavevector kappa = eta + o.shift;
      if (!grid.resolves(kappa)) continue;
      const double K = static_cast<double>(norm2(kappa)) + o.rate;
      const bool dup = std::any_of(rates.begin(), rates.end(), [&](double r) {
        return std::abs(r - K) <= 1e-12 * std::max(1.0, K);
      });
      if (dup) continue;
      rates.push_back(K);
      rhs.push_back(o.residual.at(kappa) - Gh.at(eta) * decay(K, T));
    }
    const int J = static_cast<int>(rates.size());
    if (J < P) {
      missing.push_back(eta);
      continue;
    }
    Eigen::MatrixXd A(J, P);
    Eigen::VectorXd dre(J), dim_(J);
    // Equations are divided by T (moments in the variable s / T) so that
    // lambda does not depend on the horizon.
    for (int j = 0; j < J; ++j) {
      for (int p = 0; p < P; ++p)
        A(j, p) = cosine_moment(kFourPi2 * rates[static_cast<std::size_t>(j)], p, T) / T;
      dre(j) = rhs[static_cast<std::size_t>(j)].real() / T;
      dim_(j) = rhs[static_cast<std::size_t>(j)].imag() / T;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd s = svd.singularValues();
    Eigen::VectorXd filt(s.size());
    for (int i = 0; i < s.size(); ++i) {
      const double denom = s(i) * s(i) + plan.tikhonov;
      filt(i) = denom > 0.0 ? s(i) / denom : 0.0;
    }
    const Eigen::MatrixXd& U = svd.matrixU();
    const Eigen::MatrixXd& V = svd.matrixV();
    const Eigen::VectorXd are = V * filt.cwiseProduct(U.transpose() * dre);
    const Eigen::VectorXd aim = V * filt.cwiseProduct(U.transpose() * dim_);

    FrequencyReport fr;
    fr.xi = eta;
    fr.equations = J;
    fr.condition = s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1)
                                         : std::numeric_limits<double>::infinity();
    fr.residual = std::sqrt((A * are - dre).squaredNorm() + (A * aim - dim_).squaredNorm());
    rep.frequencies.push_back(fr);
    if (fr.condition > plan.condition_threshold) {
      std::ostringstream os;
      os << "frequency " << to_string(eta, grid.dim()) << ": moment matrix condition "
         << fr.condition << " exceeds threshold";
      rep.notes.push_back(os.str());
    }
    for (int k = 0; k < out_time.nodes(); ++k) {
      cplx v = 0.0;
      for (int p = 0; p < P; ++p)
        v += cplx(are(p), aim(p)) * std::cos(p * std::numbers::pi * out_time.node(k) / T);
      slices[static_cast<std::size_t>(k)].at(eta) = v;
    }
  }
  if (!missing.empty())
    throw InsufficientProbes("recovery: fewer than P distinct decay rates for " +
                                 std::to_string(missing.size()) + " frequencies",
                             missing);
  SpaceTimeField F(grid, out_time);
  for (int k = 0; k < out_time.nodes(); ++k)
    F.set_slice(k, dft_inverse_real(slices[static_cast<std::size_t>(k)]));
  rep.F_time = std::move(F);
  finish_condition(rep);
  return rep;
}

ReconstructionReport recover_FG_simultaneous(const ProbeResponses& data, const ProbePlan& plan,
                                             double T) {
  const auto& grid = grid_of(data);
  plan.validate(grid);
  ReconstructionReport rep = base_report("F1+G1", plan, grid.dim(), T);
  FourierSpectrum Fh(grid), Gh(grid);
  std::vector<Wavevector> missing;
  std::map<Wavevector, FourierSpectrum> spectra;
  for (const auto& [z, f] : data) spectra.emplace(z, dft_forward(f));
  for (const auto& xi : frequency_box(grid.dim(), plan.cutoff)) {
    const auto dec = decompose_frequency(xi, grid.dim());
    const Wavevector z1 = -dec.xi2, z2 = -dec.xi2p;
    auto it1 = spectra.find(z1), it2 = spectra.find(z2);
    if (it1 == spectra.end() || it2 == spectra.end() || !grid.resolves(dec.xi1) ||
        !grid.resolves(dec.xi1p)) {
      missing.push_back(xi);
      continue;
    }
    // Pairing with exp(-2 pi i xi1.x) is the xi1 Fourier coefficient.
    const cplx d1 = it1->second.at(dec.xi1);
    const cplx d2 = it2->second.at(dec.xi1p);
    const auto sol = solve_pair(static_cast<double>(dec.S), static_cast<double>(dec.Sp), d1, d2, T,
                                plan.determinant_floor);
    FrequencyReport fr;
    fr.xi = xi;
    fr.equations = 2;
    fr.condition = sol.condition;
    fr.refused = sol.refused;
    rep.frequencies.push_back(fr);
    Fh.at(xi) = sol.a;
    Gh.at(xi) = sol.b;
    if (sol.refused) rep.refused.push_back(xi);
  }
  if (!missing.empty())
    throw InsufficientProbes("simultaneous recovery: probes -xi2 missing for " +
                                 std::to_string(missing.size()) + " frequencies",
                             missing);
  if (!rep.refused.empty())
    rep.notes.push_back(std::to_string(rep.refused.size()) +
                        " frequencies: 2x2 determinant below floor, G set to zero and F fitted alone");
  rep.F = dft_inverse_real(Fh);
  rep.G = dft_inverse_real(Gh);
  finish_condition(rep);
  return rep;
}

Wavevector ProductProbe::shift() const {
  Wavevector s{0, 0, 0};
  for (const auto& z : zetas) s = s + z;
  return s;
}

double ProductProbe::rate() const {
  double r = 0.0;
  for (const auto& z : zetas) r += static_cast<double>(norm2(z));
  return r;
}

std::string ProductProbe::describe(int dim) const {
  std::string s;
  for (const auto& z : zetas) s += (s.empty() ? "" : "*") + to_string(z, dim);
  return s;
}

ComplexField complex_response(const ProductProbe& p, const SpatialGrid& grid,
                              const RealMeasure& measure) {
  const std::size_t k = p.zetas.size();
  if (k == 0) throw ValidationError("complex_response: empty product probe");
  ComplexField out(grid);
  for (unsigned phases = 0; phases < (1u << k); ++phases) {
    bool skip = false;
    std::vector<ScalarField> fields;
    for (std::size_t i = 0; i < k; ++i) {
      const bool sine = phases & (1u << i);
      if (sine && is_zero(p.zetas[i])) {
        skip = true;
        break;
      }
      fields.push_back(
          ProbeSpec::plane_wave(p.zetas[i], sine ? ProbePhase::Sin : ProbePhase::Cos).realize(grid));
    }
    if (skip) continue;
    // i^{#sin}
    static const cplx ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const cplx factor = ipow[std::popcount(phases) % 4];
    const ScalarField r = measure(fields);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += factor * r[i];
  }
  return out;
}

RealMeasure direct_measure(const MfgConfig& cfg, const LinearizationOptions& opt) {
  return [cfg, opt](const std::vector<ScalarField>& probes) {
    const int k = static_cast<int>(probes.size());
    return linearize_direct(cfg, probes, k, opt).measurement((1u << k) - 1u);
  };
}

RealMeasure fd_measure(const MfgConfig& cfg, double eps, const LinearizationOptions& opt) {
  return [cfg, eps, opt](const std::vector<ScalarField>& probes) {
    const int k = static_cast<int>(probes.size());
    return fd_extract(cfg, probes, k, eps, opt).measurement((1u << k) - 1u);
  };
}

BaselineProvider make_direct_baseline(const MfgConfig& base, const LowerOrderCoefficients& lower,
                                      int k, const LinearizationOptions& opt) {
  if (k < 2) throw ValidationError("baseline: order must be >= 2");
  if (static_cast<int>(lower.F.size()) < k - 1 || static_cast<int>(lower.G.size()) < k - 1)
    throw ValidationError("recover_higher_order: lower-order coefficients up to order " +
                          std::to_string(k - 1) + " are required");
  const SpatialGrid& grid = base.grid();
  std::vector<ScalarField> F(lower.F.begin(), lower.F.begin() + (k - 1));
  std::vector<ScalarField> G(lower.G.begin(), lower.G.begin() + (k - 1));
  F.emplace_back(grid);
  G.emplace_back(grid);
  MfgConfig cfg = base;
  cfg.F = TaylorCost::running_static(std::move(F));
  cfg.G = TaylorCost::terminal(std::move(G));
  const RealMeasure measure = direct_measure(cfg, opt);
  return [measure, grid](const ProductProbe& p) { return complex_response(p, grid, measure); };
}

ReconstructionReport recover_higher_order(int k, const LowerOrderCoefficients& lower,
                                          const std::vector<OrderKDatum>& data,
                                          const BaselineProvider& baseline, HigherOrderTarget target,
                                          const std::optional<ScalarField>& known_top,
                                          const ProbePlan& plan, double T) {
  if (k < 2) throw ValidationError("recover_higher_order: k must be >= 2");
  if (static_cast<int>(lower.F.size()) < k - 1 || static_cast<int>(lower.G.size()) < k - 1)
    throw ValidationError("recover_higher_order: lower-order coefficients up to order " +
                          std::to_string(k - 1) + " are required");
  if (data.empty()) throw ValidationError("recover_higher_order: no measurements");
  if (!baseline) {
    for (int j = 0; j < k - 1; ++j)
      if (lower.F[static_cast<std::size_t>(j)].sup_norm() > 0.0 ||
          lower.G[static_cast<std::size_t>(j)].sup_norm() > 0.0)
        throw ValidationError(
            "recover_higher_order: nonzero lower-order coefficients need a baseline provider");
  }
  if (target != HigherOrderTarget::Simultaneous && !known_top)
    throw ValidationError("recover_higher_order: the other top-order coefficient must be known");

  const SpatialGrid& grid = data.front().response.grid();
  plan.validate(grid);
  std::vector<Observation> obs;
  double min_rate = std::numeric_limits<double>::infinity();
  for (const auto& d : data) {
    if (static_cast<int>(d.probe.zetas.size()) != k)
      throw ValidationError("recover_higher_order: product probe of wrong order");
    ComplexField r = d.response;
    if (baseline) r -= baseline(d.probe);
    obs.push_back({d.probe.shift(), d.probe.rate(), dft_forward(r)});
    min_rate = std::min(min_rate, d.probe.rate());
  }

  const std::string name = std::to_string(k);
  ReconstructionReport rep;
  switch (target) {
    case HigherOrderTarget::FGivenG:
      rep = base_report(("F" + name).c_str(), plan, grid.dim(), T, min_rate);
      rep.F = invert_F(obs, dft_forward(*known_top), plan, T, grid, rep);
      break;
    case HigherOrderTarget::GGivenF:
      rep = base_report(("G" + name).c_str(), plan, grid.dim(), T, min_rate);
      check_strict(plan, rep);
      rep.G = invert_G(obs, dft_forward(*known_top), plan, T, grid, rep);
      break;
    case HigherOrderTarget::Simultaneous: {
      rep = base_report(("F" + name + "+G" + name).c_str(), plan, grid.dim(), T, min_rate);
      FourierSpectrum Fh(grid), Gh(grid);
      std::vector<Wavevector> missing;
      for (const auto& xi : frequency_box(grid.dim(), plan.cutoff)) {
        struct Cand {
          double S;
          cplx d;
        };
        std::vector<Cand> cands;
        for (const auto& o : obs) {
          const Wavevector kappa = xi + o.shift;
          if (!grid.resolves(kappa)) continue;
          cands.push_back({static_cast<double>(norm2(kappa)) + o.rate, o.residual.at(kappa)});
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) { return a.S < b.S; });
        const Cand* second = nullptr;
        for (const auto& c : cands)
          if (c.S != cands.front().S) {
            second = &c;
            break;
          }
        if (!second) {
          missing.push_back(xi);
          continue;
        }
        const auto sol = solve_pair(cands.front().S, second->S, cands.front().d, second->d, T,
                                    plan.determinant_floor);
        FrequencyReport fr;
        fr.xi = xi;
        fr.equations = 2;
        fr.condition = sol.condition;
        fr.refused = sol.refused;
        rep.frequencies.push_back(fr);
        Fh.at(xi) = sol.a;
        Gh.at(xi) = sol.b;
        if (sol.refused) rep.refused.push_back(xi);
      }
      if (!missing.empty())
        throw InsufficientProbes("recover_higher_order: no two distinct rates for " +
                                     std::to_string(missing.size()) + " frequencies",
                                 missing);
      rep.F = dft_inverse_real(Fh);
      rep.G = dft_inverse_real(Gh);
      break;
    }
  }
  rep.order = k;
  finish_condition(rep);
  return rep;
}

GramReport gram_injectivity_check(const std::vector<Wavevector>& probes, int cutoff, double T,
                                  const SpatialGrid& grid) {
  GramReport r;
  r.columns = frequency_box(grid.dim(), cutoff);
  r.rows = static_cast<int>(probes.size());
  r.cols = static_cast<int>(r.columns.size());
  if (r.rows == 0) return r;
  const double two_pi = 2.0 * std::numbers::pi;
  Eigen::MatrixXcd A(r.rows, r.cols);
  for (int i = 0; i < r.rows; ++i) {
    const Wavevector& z = probes[static_cast<std::size_t>(i)];
    const double c = duhamel_weight(static_cast<double>(norm2(z)), T);
    for (int j = 0; j < r.cols; ++j) {
      const Wavevector d = r.columns[static_cast<std::size_t>(j)] - z;
      cplx s = 0.0;
      for (std::size_t p = 0; p < grid.size(); ++p) {
        const auto x = grid.point(p);
        double ph = 0.0;
        for (int a = 0; a < grid.dim(); ++a) ph += d[a] * x[a];
        s += std::polar(1.0, two_pi * ph);
      }
      A(i, j) = s / static_cast<double>(grid.size()) * c;
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A, Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  r.max_singular_value = s.size() ? s(0) : 0.0;
  int null_col;
  if (r.rows < r.cols) {
    r.min_singular_value = 0.0;  // rank deficient by dimension count
    null_col = r.cols - 1;
  } else {
    r.min_singular_value = s(s.size() - 1);
    null_col = r.cols - 1;
  }
  const auto& V = svd.matrixV();
  for (int j = 0; j < r.cols; ++j) r.null_vector.push_back(V(j, null_col));
  return r;
}

}  // namespace mfginv
