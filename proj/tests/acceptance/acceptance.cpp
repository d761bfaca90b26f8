// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "harness/commands.hpp"
#include "harness/scenario.hpp"
#include "mfginv/counterexamples.hpp"
#include "mfginv/frequency.hpp"
#include "mfginv/linearization.hpp"
#include "mfginv/mfg_solver.hpp"
#include "mfginv/parabolic.hpp"
#include "mfginv/recovery.hpp"
#include "mfginv/spectral.hpp"

using namespace mfginv;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double k4Pi2 = kTwoPi * kTwoPi;

struct Outcome {
  bool ok = true;
  std::ostringstream detail;
  void require(bool cond, const std::string& what, double value, double threshold) {
    ok = ok && cond;
    detail << (cond ? "" : "!") << what << '=' << value << " (" << threshold << ") ";
  }
};

ScalarField wave(const SpatialGrid& g, int k, bool sine = true) {
  return ScalarField::sample(g, [=](const auto& x) {
    return sine ? std::sin(kTwoPi * k * x[0]) : std::cos(kTwoPi * k * x[0]);
  });
}

std::vector<Wavevector> line(int lo, int hi) {
  std::vector<Wavevector> v;
  for (int z = lo; z <= hi; ++z) v.push_back({z, 0, 0});
  return v;
}

void spectral_core(Outcome& o) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  double rt = 0.0, pv = 0.0, semi = 0.0;
  for (int dim = 1; dim <= 3; ++dim) {
    const SpatialGrid g(dim, dim == 3 ? 16 : 64);
    ScalarField f(g);
    for (auto& v : f.values()) v = nd(rng);
    const auto s = dft_forward(f);
    rt = std::max(rt, (dft_inverse_real(s) - f).sup_norm() / f.sup_norm());
    pv = std::max(pv, std::abs(s.energy() - f.l2_norm() * f.l2_norm()) / s.energy());
    const auto ab = heat_propagate(heat_propagate(s, 1e-3), 2e-3), one = heat_propagate(s, 3e-3);
    double scale = 0.0, diff = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      scale = std::max(scale, std::abs(one[i]));
      diff = std::max(diff, std::abs(ab[i] - one[i]));
    }
    semi = std::max(semi, diff / scale);
  }
  o.require(rt <= 1e-12, "roundtrip", rt, 1e-12);
  o.require(pv <= 1e-12, "parseval", pv, 1e-12);
  o.require(semi <= 1e-15, "semigroup", semi, 1e-15);

  const SpatialGrid g(1, 64);
  const TimeGrid t(0.1, 512);
  double eig = 0.0;
  for (auto dir : {Direction::Forward, Direction::Backward}) {
    ParabolicProblem p(wave(g, 3), t);
    p.direction = dir;
    const auto sol = solve_parabolic(p);
    for (int k = 0; k < t.nodes(); ++k) {
      const double tau = dir == Direction::Forward ? t.node(k) : t.horizon() - t.node(k);
      eig = std::max(eig, (sol.w.slice(k) - std::exp(-k4Pi2 * 9 * tau) * wave(g, 3)).sup_norm());
    }
  }
  o.require(eig <= 1e-8, "eigenfunction", eig, 1e-8);
}

void forward_solver(Outcome& o) {
  const auto s = harness::parse_scenario(harness::default_scenario_text());
  const MfgConfig cfg = s.config();
  const auto g = cfg.grid();

  const auto zero = solve_mfg(cfg, ScalarField(g));
  const double z = std::max(zero.u.sup_norm(), zero.m.sup_norm());
  o.require(z == 0.0, "zero_solution", z, 0.0);

  MfgConfig dec{TaylorCost::running_static({ScalarField(g)}), TaylorCost::terminal({ScalarField(g)}),
                HamiltonianSeries::quadratic(g), cfg.time};
  const auto m0 = s.initial_density();
  const auto sd = solve_mfg(dec, m0);
  double heat = sd.u.sup_norm();
  for (int k = 0; k < cfg.time.nodes(); ++k)
    heat = std::max(heat, (sd.m.slice(k) - heat_propagate(m0, cfg.time.node(k))).sup_norm());
  o.require(heat <= 1e-8, "decoupled_vs_heat", heat, 1e-8);

  const auto sol = solve_mfg(cfg, m0);
  double drift = 0.0;
  for (int k = 0; k < cfg.time.nodes(); ++k) drift = std::max(drift, std::abs(sol.m.slice(k).mean() - m0.mean()));
  o.require(drift <= 1e-8, "mass_drift", drift, 1e-8);
  double ratio = 0.0;
  for (double r : sol.contraction_ratios) ratio = std::max(ratio, r);
  o.require(m0.sup_norm() <= 0.05 && ratio < 1.0, "max_picard_ratio", ratio, 1.0);
}

void linearization(Outcome& o) {
  const auto s = harness::parse_scenario(harness::default_scenario_text());
  const MfgConfig cfg = s.config();
  const auto probe = wave(cfg.grid(), 1);
  const auto direct = linearize_direct(cfg, {probe}, 1).measurement(1);
  const double eps[3] = {4e-3, 2e-3, 1e-3};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (double e : eps) {
    const double d = (fd_extract(cfg, {probe}, 1, e).measurement(1) - direct).sup_norm();
    const double x = std::log(e), y = std::log(d);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  o.require(std::abs(slope - 1.0) <= 0.3, "loglog_slope", slope, 1.0);

  const auto b = wave(cfg.grid(), 2, false);
  const auto x = fd_extract(cfg, {probe, b}, 2, 1e-3).measurement(3);
  const auto y = fd_extract(cfg, {b, probe}, 2, 1e-3).measurement(3);
  bool same = true;
  for (std::size_t i = 0; i < x.size(); ++i) same = same && x[i] == y[i];
  o.require(same, "swap_bitwise", same, 1);
}

void synthetic_roundtrips(Outcome& o) {
  const SpatialGrid g(1, 64);
  const double T = 0.1;
  const auto F = wave(g, 1) + 0.3 * wave(g, 2, false) + 0.1 * wave(g, 7);
  const auto G = 0.5 * wave(g, 1, false) + 0.2 * wave(g, 2);
  ProbePlan plan;
  plan.cutoff = 8;
  plan.probes = line(-12, 12);
  ProbeResponses data;
  for (const auto& z : plan.probes) data.emplace(z, synthesize_order1(F, G, z, T));
  const double ef = relative_l2_error(*recover_F1_static(data, G, plan, T).F, F);
  const double eg = relative_l2_error(*recover_G1(data, F, plan, T).G, G);
  // G sits behind exp(-4 pi^2 (|xi1|^2 + |xi2|^2) T) in the 2x2 solve; the
  // frequencies where that underflows the floor are refused, and G must have
  // no content there for the comparison to be meaningful.
  const auto fg = recover_FG_simultaneous(data, plan, T);
  const double sf = relative_l2_error(*fg.F, F), sg = relative_l2_error(*fg.G, G);
  const auto Gh = dft_forward(G);
  double lost = 0.0;
  for (const auto& xi : fg.refused) lost = std::max(lost, std::abs(Gh.at(xi)));
  o.require(lost <= 1e-15, "FG.G_content_at_refused", lost, 1e-15);
  o.require(ef <= 1e-9, "F1", ef, 1e-9);
  o.require(eg <= 1e-9, "G1", eg, 1e-9);
  o.require(sf <= 1e-9, "FG.F", sf, 1e-9);
  o.require(sg <= 1e-9, "FG.G", sg, 1e-9);

  const auto F2 = 0.7 * wave(g, 1) + 0.2 * wave(g, 3, false), G2 = 0.4 * wave(g, 1, false);
  std::vector<OrderKDatum> d2;
  for (int a = -9; a <= 9; ++a)
    for (int b : {0, 1}) {
      ProductProbe p{{{a, 0, 0}, {b, 0, 0}}};
      d2.push_back({p, synthesize_plane_response(F2, G2, p.shift(), p.rate(), T)});
    }
  const LowerOrderCoefficients lower{{ScalarField(g)}, {ScalarField(g)}};
  const auto r2f = recover_higher_order(2, lower, d2, {}, HigherOrderTarget::FGivenG, G2, plan, T);
  const auto r2g = recover_higher_order(2, lower, d2, {}, HigherOrderTarget::GGivenF, F2, plan, T);
  const double e2f = relative_l2_error(*r2f.F, F2), e2g = relative_l2_error(*r2g.G, G2);
  o.require(e2f <= 1e-8, "F2", e2f, 1e-8);
  o.require(e2g <= 1e-8, "G2", e2g, 1e-8);
}

void pipeline(Outcome& o) {
  const auto s = harness::parse_scenario(harness::default_scenario_text());
  harness::RunOptions opt;
  opt.out_dir = std::filesystem::temp_directory_path() / "mfginv_acceptance_f";
  const auto rf = harness::run("recover-f", s, opt);
  opt.out_dir = std::filesystem::temp_directory_path() / "mfginv_acceptance_g";
  const auto rg = harness::run("recover-g", s, opt);
  const double f1 = rf.metrics["F1"]["relative_l2_error"].get<double>();
  const double f2 = rf.metrics["F2"]["relative_l2_error"].get<double>();
  const double g1 = rg.metrics["G1"]["relative_l2_error"].get<double>();
  o.require(s.epsilon == 1e-3 && s.points == 64 && s.steps == 256, "setup(eps,N,M)", 1, 1);
  o.require(f1 <= 5e-2, "F1", f1, 5e-2);
  o.require(g1 <= 5e-2, "G1", g1, 5e-2);
  o.require(f2 <= 1e-1, "F2", f2, 1e-1);
}

void time_dependent(Outcome& o) {
  const SpatialGrid g(1, 64);
  const TimeGrid tg(0.02, 400);
  const auto F = SpaceTimeField::sample(g, tg, [](const auto& x, double t) { return std::sin(kTwoPi * x[0]) * (1 + t); });
  ProbePlan plan;
  plan.cutoff = 1;
  plan.time_basis = 3;
  plan.tikhonov = 1e-8;
  plan.probes = line(0, 5);
  ProbeResponses data;
  for (const auto& z : plan.probes) data.emplace(z, synthesize_order1(F, ScalarField(g), z));
  const auto r = recover_F1_timedep(data, ScalarField(g), plan, tg);
  const double e = relative_l2_error(*r.F_time, F);
  o.require(e <= 5e-2, "F1(x,t)", e, 5e-2);
  o.require(!r.frequencies.empty(), "conditions_reported", static_cast<double>(r.frequencies.size()), 1);
  o.detail << "max_condition=" << r.max_condition << ' ';
}

void counterexamples(Outcome& o) {
  const auto running = verify_running_cost_pair();
  o.require(running.check("residual_u1").value <= 1e-13 && running.check("residual_u2").value <= 1e-13, "residuals",
            std::max(running.check("residual_u1").value, running.check("residual_u2").value), 1e-13);
  o.require(running.check("initial_measurement_equal").value == 0.0, "measurement_diff",
            running.check("initial_measurement_equal").value, 0.0);
  o.require(running.metrics.at("cost_gap_sup") > 0.9, "cost_gap", running.metrics.at("cost_gap_sup"), 0.9);

  const auto terminal = verify_terminal_cost_pair();
  const bool flagged = terminal.metrics.at("Lu1_vs_half_form") <= 1e-13 && terminal.metrics.at("Lu1_vs_quarter_form") > 0 &&
                       !terminal.flags.empty();
  o.require(flagged, "half_vs_quarter_flag", terminal.metrics.at("Lu1_vs_quarter_form"), 0);

  // Either the construction holds, or the report must state each sub-condition.
  const auto ode = build_time_independent_counterexample();
  bool stated = !ode.notes.empty();
  for (const auto& name : {"dt_Lu1_zero", "dt_Lu2_zero", "endpoints_equal"}) {
    const auto& c = ode.check(name);
    o.detail << name << (c.passed ? ":verified " : ":failed ");
    const std::string line = std::string(name) + (c.passed ? ": verified" : ": failed");
    bool found = false;
    for (const auto& n : ode.notes) found = found || n.rfind(line, 0) == 0;
    stated = stated && found;
  }
  o.require(ode.passed() || stated, "ode_report_explicit", stated ? 1.0 : 0.0, 1);
}

void density(Outcome& o) {
  const SpatialGrid g(1, 32);
  const auto probes = line(-4, 4);
  const auto full = gram_injectivity_check(probes, 4, 0.1, g);
  auto fewer = probes;
  fewer.erase(fewer.begin() + 2);
  const auto cut = gram_injectivity_check(fewer, 4, 0.1, g);
  o.require(full.min_singular_value > 0.0, "full_min_sv", full.min_singular_value, 0.0);
  o.require(cut.min_singular_value == 0.0, "reduced_min_sv", cut.min_singular_value, 0.0);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria{
      {"spectral core", spectral_core},
      {"forward solver", forward_solver},
      {"linearization cross-validation", linearization},
      {"synthetic recovery round trips", synthetic_roundtrips},
      {"end-to-end pipeline recovery", pipeline},
      {"time-dependent moment inversion", time_dependent},
      {"counterexamples", counterexamples},
      {"density surrogate", density},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += o.ok ? 0 : 1;
    std::printf("[%s] criterion %zu: %s (%.2fs) %s\n", o.ok ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
