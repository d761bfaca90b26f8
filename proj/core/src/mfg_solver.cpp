// SPDX-License-Identifier: Apache-2.0
#include "mfginv/mfg_solver.hpp"

#include <cmath>

#include "mfginv/errors.hpp"

namespace mfginv {
namespace {

std::array<double, 3> mean_a1(const MfgConfig& cfg) {
  std::array<double, 3> a{0.0, 0.0, 0.0};
  const auto c = extract_linearization_coeffs(cfg.H);
  for (int j = 0; j < cfg.grid().dim(); ++j) a[j] = c.a1[static_cast<std::size_t>(j)].mean();
  return a;
}

std::array<double, 3> negate(std::array<double, 3> a) {
  for (double& v : a) v = -v;
  return a;
}

// Running cost F(x, t_k, m_k) for every node.
SpaceTimeField running_cost(const MfgConfig& cfg, const SpaceTimeField& m) {
  SpaceTimeField out(m.grid(), m.time());
  for (int k = 0; k < m.time().nodes(); ++k) {
    const std::optional<int> tk =
        cfg.F.kind() == CostKind::Running ? std::optional<int>(k) : std::nullopt;
    out.set_slice(k, cost_eval(cfg.F, m.slice(k), tk));
  }
  return out;
}

// HJB in reversed time: d_tau u = Lap u - abar . grad u + [F - H(grad u) + abar . grad u].
ExplicitTerm hjb_term(const MfgConfig& cfg, const SpaceTimeField& Fm, std::array<double, 3> abar) {
  return [&cfg, &Fm, abar](int k, const ScalarField&, const FourierSpectrum& u_hat,
                           ExplicitAccumulator& acc) {
    const VectorField grad = spectral_gradient(u_hat);
    ScalarField n = hamiltonian_eval(cfg.H, grad);
    const auto f = Fm.slice_span(k);
    for (std::size_t i = 0; i < n.size(); ++i) {
      double lin = 0.0;
      for (std::size_t j = 0; j < grad.size(); ++j) lin += abar[j] * grad[j][i];
      n[i] = f[i] - n[i] + lin;
    }
    acc.add_scalar(n);
  };
}

// FP: d_t m = Lap m + abar-advection + div(m (H_p(grad u) - abar)).
std::vector<SpaceTimeField> fp_drift(const MfgConfig& cfg, const SpaceTimeField& u,
                                     std::array<double, 3> abar) {
  const int n = u.grid().dim();
  std::vector<SpaceTimeField> b(static_cast<std::size_t>(n), SpaceTimeField(u.grid(), u.time()));
  for (int k = 0; k < u.time().nodes(); ++k) {
    const VectorField hp = hamiltonian_grad(cfg.H, spectral_gradient(u.slice(k)));
    for (int j = 0; j < n; ++j) {
      auto dst = b[static_cast<std::size_t>(j)].slice_span(k);
      const auto& src = hp[static_cast<std::size_t>(j)];
      for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] - abar[j];
    }
  }
  return b;
}

ExplicitTerm fp_term(const std::vector<SpaceTimeField>& b) {
  return [&b](int k, const ScalarField& m, const FourierSpectrum&, ExplicitAccumulator& acc) {
    VectorField flux;
    for (const auto& bj : b) {
      ScalarField f = m;
      const auto s = bj.slice_span(k);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] *= s[i];
      flux.push_back(std::move(f));
    }
    acc.add_divergence(flux);
  };
}

double max_speed2(const std::vector<SpaceTimeField>& b) {
  double m = 0.0;
  if (b.empty()) return m;
  for (std::size_t i = 0; i < b.front().values().size(); ++i) {
    double s = 0.0;
    for (const auto& bj : b) s += bj.values()[i] * bj.values()[i];
    m = std::max(m, s);
  }
  return m;
}

void check_dt(double dt, double speed2, const char* what) {
  if (speed2 > 0.0 && dt * speed2 > 1.0)
    throw StabilityError(std::string(what) + ": dt exceeds the explicit drift bound " +
                             std::to_string(1.0 / speed2),
                         1.0 / speed2);
}

ScalarField terminal_data(const MfgConfig& cfg, const SpaceTimeField& m) {
  return cost_eval(cfg.G, m.slice(m.time().steps()));
}

}  // namespace

void MfgConfig::validate() const {
  if (F.kind() == CostKind::Terminal) throw ValidationError("F: must be a running cost");
  if (G.kind() != CostKind::Terminal) throw ValidationError("G: must be a terminal cost");
  require_same_grid(F.grid(), G.grid(), "F/G");
  require_same_grid(F.grid(), H.grid(), "F/H");
  if (F.kind() == CostKind::Running && !(*F.time() == time))
    throw ValidationError("F: time grid differs from the solver time grid");
  if (!(picard.relaxation > 0.0 && picard.relaxation <= 1.0))
    throw ValidationError("relaxation: must lie in (0, 1]");
  if (!(picard.tolerance > 0.0)) throw ValidationError("tolerance: must be positive");
  if (picard.max_iters < 1) throw ValidationError("max_iters: must be >= 1");
  if (!(smallness > 0.0)) throw ValidationError("smallness: must be positive");
}

SpaceTimeField solve_hjb(const MfgConfig& cfg, const SpaceTimeField& m) {
  const auto abar = mean_a1(cfg);
  {
    const auto c = extract_linearization_coeffs(cfg.H);
    double s = 0.0;
    for (std::size_t i = 0; i < cfg.grid().size(); ++i) {
      double v = 0.0;
      for (int j = 0; j < cfg.grid().dim(); ++j) {
        const double d = c.a1[static_cast<std::size_t>(j)][i] - abar[j];
        v += d * d;
      }
      s = std::max(s, v);
    }
    check_dt(cfg.time.dt(), s, "HJB");
  }
  const SpaceTimeField Fm = running_cost(cfg, m);
  return exponential_march(cfg.grid(), cfg.time, Direction::Backward, terminal_data(cfg, m),
                           negate(abar), cfg.dealias, hjb_term(cfg, Fm, abar));
}

SpaceTimeField solve_fp(const MfgConfig& cfg, const SpaceTimeField& u, const ScalarField& m0) {
  const auto abar = mean_a1(cfg);
  const auto b = fp_drift(cfg, u, abar);
  check_dt(cfg.time.dt(), max_speed2(b), "Fokker-Planck");
  return exponential_march(cfg.grid(), cfg.time, Direction::Forward, m0, abar, cfg.dealias,
                           fp_term(b));
}

MfgResiduals residual_check(const SpaceTimeField& u, const SpaceTimeField& m,
                            const ScalarField& m0, const MfgConfig& cfg) {
  const auto abar = mean_a1(cfg);
  MfgResiduals r;
  const SpaceTimeField Fm = running_cost(cfg, m);
  const auto hjb = exponential_defect(u, Direction::Backward, negate(abar), cfg.dealias,
                                      hjb_term(cfg, Fm, abar));
  const auto b = fp_drift(cfg, u, abar);
  const auto fp = exponential_defect(m, Direction::Forward, abar, cfg.dealias, fp_term(b));
  r.hjb = hjb.sup;
  r.hjb_l2 = hjb.l2;
  r.fp = fp.sup;
  r.fp_l2 = fp.l2;
  r.terminal = (u.slice(u.time().steps()) - terminal_data(cfg, m)).sup_norm();
  r.initial = (m.slice(0) - m0).sup_norm();
  return r;
}

MfgResiduals residual_check(const MfgSolution& sol, const MfgConfig& cfg) {
  return residual_check(sol.u, sol.m, sol.m.slice(0), cfg);
}

MfgSolution solve_mfg(const MfgConfig& cfg, const ScalarField& m0) {
  cfg.validate();
  require_same_grid(cfg.grid(), m0.grid(), "m0");
  if (!m0.all_finite()) throw ValidationError("m0: non-finite values");
  const double m0_sup = m0.sup_norm();
  const double theta = cfg.picard.relaxation;

  SpaceTimeField zero_u(cfg.grid(), cfg.time);
  SpaceTimeField m = solve_fp(cfg, zero_u, m0);

  MfgSolution sol{zero_u, m, 0, {}, {}, {}, 0.0, m0_sup <= cfg.smallness};
  double prev = 0.0;
  bool converged = false;
  for (int it = 1; it <= cfg.picard.max_iters; ++it) {
    const SpaceTimeField u = solve_hjb(cfg, m);
    SpaceTimeField m_new = solve_fp(cfg, u, m0);
    double delta = 0.0;
    auto mv = m.values();
    auto nv = m_new.values();
    for (std::size_t i = 0; i < mv.size(); ++i) {
      const double next = (1.0 - theta) * mv[i] + theta * nv[i];
      delta = std::max(delta, std::abs(next - mv[i]));
      mv[i] = next;
    }
    if (!std::isfinite(delta) || delta > 1e8 * std::max(1.0, m0_sup))
      throw DivergenceError("Picard iteration diverged at sweep " + std::to_string(it), it,
                            cfg.time.horizon());
    sol.iterations = it;
    sol.update_norms.push_back(delta);
    if (it > 1 && prev > 0.0) sol.contraction_ratios.push_back(delta / prev);
    prev = delta;
    if (delta < cfg.picard.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NoConvergenceError("Picard iteration did not converge in " +
                                 std::to_string(cfg.picard.max_iters) + " sweeps",
                             cfg.picard.max_iters,
                             sol.contraction_ratios.empty() ? 0.0 : sol.contraction_ratios.back());
  // Imposed exactly; the relaxed update can only round it.
  m.set_slice(0, m0);
  sol.u = solve_hjb(cfg, m);
  sol.m = std::move(m);
  sol.residuals = residual_check(sol.u, sol.m, m0, cfg);
  sol.norm_ratio = m0_sup > 0.0 ? std::max(sol.u.sup_norm(), sol.m.sup_norm()) / m0_sup : 0.0;
  return sol;
}

ScalarField measure(const MfgConfig& cfg, const ScalarField& m0) {
  return solve_mfg(cfg, m0).u.slice(0);
}

}  // namespace mfginv
