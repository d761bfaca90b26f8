// SPDX-License-Identifier: Apache-2.0
#include "mfginv/linearization.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "mfginv/errors.hpp"

namespace mfginv {

ProbeSpec ProbeSpec::plane_wave(const Wavevector& zeta, ProbePhase phase) {
  ProbeSpec p;
  p.mode = ProbeMode::PlaneWave;
  p.zeta = zeta;
  p.phase = phase;
  return p;
}

ProbeSpec ProbeSpec::constant() { return ProbeSpec{}; }

ProbeSpec ProbeSpec::from_field(ScalarField f) {
  ProbeSpec p;
  p.mode = ProbeMode::Custom;
  p.custom = std::move(f);
  return p;
}

ScalarField ProbeSpec::realize(const SpatialGrid& grid) const {
  switch (mode) {
    case ProbeMode::Constant: return ScalarField::constant(grid, amplitude);
    case ProbeMode::PlaneWave: {
      if (!grid.resolves(zeta))
        throw ValidationError("probe: wave vector " + to_string(zeta, grid.dim()) +
                              " is not below the Nyquist limit");
      const double two_pi = 2.0 * std::numbers::pi;
      return ScalarField::sample(grid, [&](const std::array<double, 3>& x) {
        double ph = 0.0;
        for (int j = 0; j < grid.dim(); ++j) ph += zeta[j] * x[j];
        ph *= two_pi;
        return amplitude * (phase == ProbePhase::Cos ? std::cos(ph) : std::sin(ph));
      });
    }
    case ProbeMode::Custom: {
      if (!custom) throw ValidationError("probe: custom mode without a field");
      require_same_grid(grid, custom->grid(), "custom probe");
      ScalarField f = *custom;
      const double s = f.sup_norm();
      if (s > 0.0) f *= amplitude / s;
      return f;
    }
  }
  return ScalarField(grid);
}

std::string ProbeSpec::describe(int dim) const {
  switch (mode) {
    case ProbeMode::Constant: return "constant";
    case ProbeMode::PlaneWave:
      return std::string(phase == ProbePhase::Cos ? "cos" : "sin") + to_string(zeta, dim);
    case ProbeMode::Custom: return "custom";
  }
  return "?";
}

ScalarField LinearizationResult::measurement(unsigned mask) const {
  auto it = u.find(mask);
  if (it == u.end()) throw ValidationError("linearization: no result for mask " + std::to_string(mask));
  return it->second.slice(0);
}

void for_each_partition(unsigned mask, const std::function<void(const std::vector<unsigned>&)>& fn) {
  std::vector<unsigned> blocks;
  std::function<void(unsigned)> rec = [&](unsigned rest) {
    if (rest == 0) {
      fn(blocks);
      return;
    }
    const unsigned low = rest & (~rest + 1u);
    const unsigned others = rest & ~low;
    // Enumerate every subset of `others` to join `low` in its block.
    unsigned sub = others;
    for (;;) {
      blocks.push_back(low | sub);
      rec(others & ~sub);
      blocks.pop_back();
      if (sub == 0) break;
      sub = (sub - 1) & others;
    }
  };
  rec(mask);
}

namespace {

std::array<double, 3> mean_of(const VectorField& a) {
  std::array<double, 3> m{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < a.size(); ++j) m[j] = a[j].mean();
  return m;
}

SpaceTimeField broadcast(const ScalarField& f, const TimeGrid& time) {
  SpaceTimeField out(f.grid(), time);
  for (int k = 0; k < time.nodes(); ++k) out.set_slice(k, f);
  return out;
}

// Linearized hierarchy over probe subsets.
class Hierarchy {
 public:
  Hierarchy(const MfgConfig& cfg, std::vector<ScalarField> probes, const LinearizationOptions& opt)
      : cfg_(cfg), opt_(opt), probes_(std::move(probes)), grid_(cfg.grid()), time_(cfg.time) {
    const auto lc = extract_linearization_coeffs(cfg.H);
    abar_ = mean_of(lc.a1);
    for (int j = 0; j < grid_.dim(); ++j) {
      ScalarField var = lc.a1[static_cast<std::size_t>(j)];
      for (auto& v : var.values()) v -= abar_[j];
      if (var.sup_norm() > 0.0) has_var_drift_ = true;
      a1_var_.push_back(std::move(var));
    }
    F1_ = cfg.F.coefficient_spacetime(1, time_);
  }

  void solve(unsigned mask) {
    if (m_.count(mask)) return;
    for (unsigned sub = (mask - 1) & mask; sub != 0; sub = (sub - 1) & mask) solve(sub);
    solve_m(mask);
    solve_u(mask);
  }

  LinearizationResult result(int order) const {
    LinearizationResult r;
    r.order = order;
    r.method = LinearizationMethod::Direct;
    r.u = u_;
    r.m = m_;
    return r;
  }

  void seed(unsigned mask, const SpaceTimeField& u, const SpaceTimeField& m) {
    u_.emplace(mask, u);
    m_.emplace(mask, m);
    grad_.emplace(mask, gradients(u));
  }

 private:
  std::vector<SpaceTimeField> gradients(const SpaceTimeField& u) const {
    std::vector<SpaceTimeField> g(static_cast<std::size_t>(grid_.dim()),
                                  SpaceTimeField(grid_, time_));
    for (int k = 0; k < time_.nodes(); ++k) {
      const VectorField gk = spectral_gradient(u.slice(k));
      for (std::size_t j = 0; j < gk.size(); ++j) g[j].set_slice(k, gk[j]);
    }
    return g;
  }

  VectorField grad_at(unsigned mask, int k) const {
    VectorField v;
    for (const auto& c : grad_.at(mask)) v.push_back(c.slice(k));
    return v;
  }

  // V_R(k)_j = sum over partitions pi of R of D^{|pi|+1} H(0)[e_j, grad u_B ...].
  VectorField V(unsigned R, int k) const {
    VectorField acc(static_cast<std::size_t>(grid_.dim()), ScalarField(grid_));
    for_each_partition(R, [&](const std::vector<unsigned>& blocks) {
      std::vector<VectorField> g;
      for (unsigned b : blocks) g.push_back(grad_at(b, k));
      std::vector<const VectorField*> ptrs;
      for (const auto& x : g) ptrs.push_back(&x);
      const VectorField t = hamiltonian_grad_multilinear(cfg_.H, ptrs);
      for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += t[j];
    });
    return acc;
  }

  void add_var_drift(ParabolicProblem& p, double sign) const {
    if (!has_var_drift_) return;
    for (const auto& a : a1_var_) {
      ScalarField s = a;
      s *= sign;
      p.drift.push_back(broadcast(s, time_));
    }
  }

  void solve_m(unsigned S) {
    const bool single = std::popcount(S) == 1;
    ScalarField data = single ? probes_[static_cast<std::size_t>(std::countr_zero(S))]
                              : ScalarField(grid_);
    ParabolicProblem p(std::move(data), time_);
    p.direction = Direction::Forward;
    p.drift_form = DriftForm::Divergence;
    p.dealias = opt_.dealias;
    p.constant_drift = abar_;
    add_var_drift(p, 1.0);
    if (!single) {
      SpaceTimeField src(grid_, time_);
      for (int k = 0; k < time_.nodes(); ++k) {
        VectorField flux(static_cast<std::size_t>(grid_.dim()), ScalarField(grid_));
        for (unsigned A = (S - 1) & S; A != 0; A = (A - 1) & S) {
          const VectorField v = V(S & ~A, k);
          const auto mA = m_.at(A).slice_span(k);
          for (std::size_t j = 0; j < flux.size(); ++j)
            for (std::size_t i = 0; i < grid_.size(); ++i) flux[j][i] += mA[i] * v[j][i];
        }
        src.set_slice(k, spectral_divergence(flux));
      }
      p.source = std::move(src);
    }
    m_.emplace(S, solve_parabolic(p).w);
  }

  void solve_u(unsigned S) {
    SpaceTimeField src(grid_, time_);
    bool have_src = false;
    ScalarField terminal(grid_);
    const int last = time_.steps();
    for_each_partition(S, [&](const std::vector<unsigned>& blocks) {
      const int r = static_cast<int>(blocks.size());
      // Terminal: G^(r) prod m_B(T).
      {
        ScalarField prod = cfg_.G.coefficient(r);
        for (unsigned b : blocks) prod.multiply(m_.at(b).slice(last));
        terminal += prod;
      }
      if (r < 2) return;
      have_src = true;
      std::vector<VectorField> g;
      for (int k = 0; k < time_.nodes(); ++k) {
        ScalarField prod = cfg_.F.coefficient(r, cfg_.F.kind() == CostKind::Running ? k : 0);
        for (unsigned b : blocks) {
          const auto mb = m_.at(b).slice_span(k);
          for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= mb[i];
        }
        g.clear();
        for (unsigned b : blocks) g.push_back(grad_at(b, k));
        std::vector<const VectorField*> ptrs;
        for (const auto& x : g) ptrs.push_back(&x);
        prod -= hamiltonian_multilinear(cfg_.H, ptrs);
        auto dst = src.slice_span(k);
        for (std::size_t i = 0; i < prod.size(); ++i) dst[i] += prod[i];
      }
    });

    ParabolicProblem p(std::move(terminal), time_);
    p.direction = Direction::Backward;
    p.drift_form = DriftForm::Nondivergence;
    p.dealias = opt_.dealias;
    for (int j = 0; j < 3; ++j) p.constant_drift[j] = -abar_[j];
    add_var_drift(p, -1.0);
    p.potential = F1_;
    p.coupling = m_.at(S);
    if (have_src) p.source = std::move(src);
    SpaceTimeField u = solve_parabolic(p).w;
    grad_.emplace(S, gradients(u));
    u_.emplace(S, std::move(u));
  }

  const MfgConfig& cfg_;
  LinearizationOptions opt_;
  std::vector<ScalarField> probes_;
  SpatialGrid grid_;
  TimeGrid time_;
  std::array<double, 3> abar_{0.0, 0.0, 0.0};
  VectorField a1_var_;
  bool has_var_drift_ = false;
  SpaceTimeField F1_{grid_, time_};
  std::map<unsigned, SpaceTimeField> u_, m_;
  std::map<unsigned, std::vector<SpaceTimeField>> grad_;
};

void check_probes(const MfgConfig& cfg, const std::vector<ScalarField>& probes) {
  if (probes.empty()) throw ValidationError("linearization: empty probe list");
  if (probes.size() > 16) throw ValidationError("linearization: at most 16 probes");
  for (const auto& f : probes) require_same_grid(cfg.grid(), f.grid(), "probe");
}

}  // namespace

LinearizationResult linearize_direct(const MfgConfig& cfg, const std::vector<ScalarField>& probes,
                                     int order, const LinearizationOptions& opt) {
  cfg.validate();
  check_probes(cfg, probes);
  if (order < 1) throw ValidationError("linearization: order must be >= 1");
  Hierarchy h(cfg, probes, opt);
  const unsigned full = (1u << probes.size()) - 1u;
  for (unsigned S = 1; S <= full; ++S)
    if (std::popcount(S) <= order) h.solve(S);
  return h.result(order);
}

LinearizationResult linearize_direct_order1(const MfgConfig& cfg, const ProbeSpec& f1,
                                            const LinearizationOptions& opt) {
  return linearize_direct(cfg, {f1.realize(cfg.grid())}, 1, opt);
}

LinearizationResult linearize_direct_order2(const MfgConfig& cfg, const ProbeSpec& f1,
                                            const ProbeSpec& f2,
                                            const LinearizationResult& first_order,
                                            const LinearizationOptions& opt) {
  cfg.validate();
  if (!first_order.u.count(1) || !first_order.u.count(2))
    throw ValidationError("linearize_direct_order2: first-order result must hold masks 1 and 2");
  Hierarchy h(cfg, {f1.realize(cfg.grid()), f2.realize(cfg.grid())}, opt);
  h.seed(1, first_order.u.at(1), first_order.m.at(1));
  h.seed(2, first_order.u.at(2), first_order.m.at(2));
  h.solve(3);
  return h.result(2);
}

namespace {

template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(std::max(1, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

LinearizationResult fd_extract(const MfgConfig& cfg, const std::vector<ScalarField>& probes,
                               int order, double eps, const LinearizationOptions& opt) {
  cfg.validate();
  check_probes(cfg, probes);
  if (!(eps > 0.0)) throw ValidationError("fd_extract: epsilon must be positive");
  if (order < 1) throw ValidationError("fd_extract: order must be >= 1");
  if (order >= 2 && static_cast<int>(probes.size()) != order)
    throw ValidationError("fd_extract: order " + std::to_string(order) + " needs exactly " +
                          std::to_string(order) + " probes");

  MfgConfig corner_cfg = cfg;
  corner_cfg.picard.tolerance = opt.corner_tolerance;
  corner_cfg.picard.max_iters = opt.corner_max_iters;

  std::vector<unsigned> corners;
  if (order == 1) {
    for (std::size_t l = 0; l < probes.size(); ++l) corners.push_back(1u << l);
  } else {
    for (unsigned A = 1; A < (1u << order); ++A) corners.push_back(A);
  }

  struct Corner {
    std::optional<SpaceTimeField> u, m;
  };
  std::vector<Corner> solved(corners.size());
  parallel_for(corners.size(), opt.threads, [&](std::size_t c) {
    ScalarField m0(cfg.grid());
    for (std::size_t l = 0; l < probes.size(); ++l)
      if (corners[c] & (1u << l)) m0.axpy(eps, probes[l]);
    auto sol = solve_mfg(corner_cfg, m0);
    solved[c].u = std::move(sol.u);
    solved[c].m = std::move(sol.m);
  });
  std::map<unsigned, const Corner*> at;
  for (std::size_t c = 0; c < corners.size(); ++c) at[corners[c]] = &solved[c];

  LinearizationResult r;
  r.order = order;
  r.method = LinearizationMethod::FiniteDifference;
  r.epsilon = eps;
  for (unsigned B : corners) {
    const int k = std::popcount(B);
    if (k > order) continue;
    auto combine = [&](auto member) {
      SpaceTimeField out = *(at.at(B)->*member);
      if (k == 2) {
        const unsigned a = B & (~B + 1u), b = B & ~a;
        // (S12 - (S1 + S2)) + S0 with S0 = 0; symmetric under a <-> b.
        SpaceTimeField pair = *(at.at(a)->*member);
        pair += *(at.at(b)->*member);
        out -= pair;
      } else if (k > 2) {
        for (unsigned A = (B - 1) & B; A != 0; A = (A - 1) & B) {
          SpaceTimeField s = *(at.at(A)->*member);
          if ((k - std::popcount(A)) % 2) s *= -1.0;
          out += s;
        }
      }
      out *= 1.0 / std::pow(eps, k);
      return out;
    };
    r.u.emplace(B, combine(&Corner::u));
    r.m.emplace(B, combine(&Corner::m));
  }
  return r;
}

CrossValidation cross_validate_order1(const MfgConfig& cfg, const ScalarField& probe, double eps,
                                      double multiple, int max_halvings,
                                      const LinearizationOptions& opt) {
  CrossValidation cv;
  cv.direct = linearize_direct(cfg, {probe}, 1, opt);
  for (int h = 0;; ++h) {
    cv.fd = fd_extract(cfg, {probe}, 1, eps, opt);
    cv.epsilon = eps;
    cv.halvings = h;
    cv.discrepancy = (cv.fd.u.at(1) - cv.direct.u.at(1)).sup_norm();
    cv.passed = cv.discrepancy <= multiple * eps;
    if (cv.passed || h >= max_halvings) break;
    eps *= 0.5;
  }
  return cv;
}

}  // namespace mfginv
