// SPDX-License-Identifier: Apache-2.0
#include "harness/commands.hpp"

#include <chrono>
#include <cstdlib>
#include <ostream>
#include <set>

#include "mfginv/counterexamples.hpp"
#include "mfginv/errors.hpp"
#include "mfginv/field_io.hpp"
#include "mfginv/frequency.hpp"
#include "mfginv/spectral.hpp"

namespace mfginv::harness {

namespace fs = std::filesystem;

namespace {

struct Context {
  const Scenario& s;
  const RunOptions& opt;
  fs::path dir;
  RunReport& rep;

  void log(const std::string& line) const {
    if (opt.verbose && opt.log) *opt.log << line << '\n';
  }
  LinearizationOptions lin() const {
    LinearizationOptions o;
    o.threads = opt.threads;
    return o;
  }
  template <class Field>
  void save(const std::string& name, const Field& f) {
    write_field(dir / name, f);
    rep.artifacts.push_back(name);
  }
};

double pipeline_tol(const Scenario& s, double synthetic, double measured) {
  return s.source == DataSource::Synthetic ? synthetic : measured;
}

double mass_drift(const SpaceTimeField& m) {
  const double m0 = m.slice(0).mean();
  double d = 0.0;
  for (int k = 0; k < m.time().nodes(); ++k) d = std::max(d, std::abs(m.slice(k).mean() - m0));
  return d;
}

RealMeasure measurement_operator(const Scenario& s, const MfgConfig& cfg, const LinearizationOptions& lo) {
  if (s.source == DataSource::Direct) return direct_measure(cfg, lo);
  return fd_measure(cfg, s.epsilon, lo);
}

ProbeResponses order1_data(Context& c, const MfgConfig& cfg, const std::vector<Wavevector>& zetas) {
  const Scenario& s = c.s;
  ProbeResponses data;
  const auto measure = measurement_operator(s, cfg, c.lin());
  for (const auto& z : zetas) {
    if (data.count(z)) continue;
    if (s.source == DataSource::Synthetic) {
      if (s.running_cost_time_dependent())
        data.emplace(z, synthesize_order1(s.F_coefficient_spacetime(1), s.G_coefficient(1), z));
      else
        data.emplace(z, synthesize_order1(s.F_coefficient(1), s.G_coefficient(1), z, s.horizon));
    } else {
      data.emplace(z, complex_response(ProductProbe{{z}}, cfg.grid(), measure));
    }
    c.log("probe " + to_string(z, s.dimension) + " measured");
  }
  return data;
}

// Order-2 data from the constant probe pair, with its baseline.
struct Order2Data {
  std::vector<OrderKDatum> data;
  BaselineProvider baseline;
  LowerOrderCoefficients lower;
};

Order2Data order2_data(Context& c, const MfgConfig& cfg, LowerOrderCoefficients lower) {
  const Scenario& s = c.s;
  const ProductProbe pp{{Wavevector{0, 0, 0}, Wavevector{0, 0, 0}}};
  Order2Data out;
  if (s.source == DataSource::Synthetic) {
    // Synthetic order-2 data carry only the top-order contribution.
    out.data.push_back({pp, synthesize_plane_response(s.F_coefficient(2), s.G_coefficient(2), pp.shift(),
                                                      pp.rate(), s.horizon)});
    out.lower = {{ScalarField(cfg.grid())}, {ScalarField(cfg.grid())}};
    return out;
  }
  out.data.push_back({pp, complex_response(pp, cfg.grid(), measurement_operator(s, cfg, c.lin()))});
  out.baseline = make_direct_baseline(cfg, lower, 2, c.lin());
  out.lower = std::move(lower);
  return out;
}

void record(RunReport& rep, const std::string& key, const ReconstructionReport& r) {
  auto& j = rep.metrics[key];
  j["target"] = r.target;
  j["cutoff_requested"] = r.cutoff_requested;
  j["max_admissible_cutoff"] = r.max_admissible_cutoff;
  j["amplification_limit"] = r.amplification_limit;
  if (std::isfinite(r.max_condition)) j["max_condition"] = r.max_condition; else j["max_condition"] = nullptr;
  auto& refused = j["refused"] = nlohmann::ordered_json::array();
  for (const auto& xi : r.refused) refused.push_back(to_string(xi, 3));
  j["notes"] = r.notes;
  for (const auto& n : r.notes) rep.notes.push_back(key + ": " + n);
}

ScalarField masked_truth(const ScalarField& truth, int cutoff, const std::vector<Wavevector>& refused) {
  FourierSpectrum s = dft_forward(band_limit(truth, cutoff));
  for (const auto& xi : refused) s.at(xi) = 0.0;
  return dft_inverse_real(s);
}

// ---------------------------------------------------------------------------

void cmd_forward(Context& c) {
  const MfgConfig cfg = c.s.config();
  const auto sol = solve_mfg(cfg, c.s.initial_density());
  c.save("u.mfgf", sol.u);
  c.save("m.mfgf", sol.m);
  emit_plot_data(c.rep, {{"u_t0", sol.u.slice(0)}, {"m_tT", sol.m.slice(cfg.time.steps())}}, {}, c.dir);

  auto& j = c.rep.metrics;
  j["iterations"] = sol.iterations;
  j["update_norms"] = sol.update_norms;
  j["contraction_ratios"] = sol.contraction_ratios;
  j["norm_ratio"] = sol.norm_ratio;
  j["small_data"] = sol.small_data;
  j["residuals"] = {{"hjb", sol.residuals.hjb}, {"fp", sol.residuals.fp},
                    {"terminal", sol.residuals.terminal}, {"initial", sol.residuals.initial}};
  double ratio = 0.0;
  for (double r : sol.contraction_ratios) ratio = std::max(ratio, r);
  if (sol.small_data)
    c.rep.checks.push_back({"picard_contraction", ratio < 1.0, ratio, 1.0, "max successive update ratio, must be < 1"});
  else
    c.rep.notes.push_back("m0 outside the small-data ball; contraction not checked");
  c.rep.check_at_most("mass_conservation", mass_drift(sol.m), 1e-8);
  c.rep.check_at_most("hjb_residual", sol.residuals.hjb, 1e-8);
  c.rep.check_at_most("fp_residual", sol.residuals.fp, std::max(1e-8, 10.0 * cfg.picard.tolerance));
}

void cmd_measure(Context& c) {
  const MfgConfig cfg = c.s.config();
  const ScalarField m0 = c.s.initial_density();
  const ScalarField u0 = measure(cfg, m0);
  c.save("measurement.mfgf", u0);
  emit_plot_data(c.rep, {{"measurement", u0}}, {}, c.dir);
  c.rep.metrics["sup_norm"] = u0.sup_norm();
  c.rep.check_true("finite", u0.all_finite());
  if (m0.sup_norm() == 0.0) c.rep.check_at_most("zero_input_zero_output", u0.sup_norm(), 0.0);
}

void cmd_linearize(Context& c) {
  const Scenario& s = c.s;
  const MfgConfig cfg = s.config();
  const auto grid = cfg.grid();
  std::vector<ScalarField> probes;
  for (const auto& z : s.probes) probes.push_back(ProbeSpec::plane_wave(z).realize(grid));

  const auto direct = linearize_direct(cfg, probes, 1, c.lin());
  const auto fd = fd_extract(cfg, probes, 1, s.epsilon, c.lin());
  auto& disc = c.rep.metrics["order1_discrepancy"] = nlohmann::ordered_json::array();
  double worst = 0.0;
  for (std::size_t l = 0; l < probes.size(); ++l) {
    const unsigned mask = 1u << l;
    const double d = (fd.measurement(mask) - direct.measurement(mask)).sup_norm();
    worst = std::max(worst, d);
    disc.push_back(d);
    c.save("u1_probe" + std::to_string(l) + ".mfgf", direct.u.at(mask));
  }
  c.rep.check_at_most("order1_fd_vs_direct", worst, 100.0 * s.epsilon);

  if (s.order >= 2) {
    std::vector<ScalarField> pair{probes.front(), probes.size() > 1 ? probes[1] : probes.front()};
    const auto d2 = linearize_direct(cfg, pair, 2, c.lin());
    const auto f2 = fd_extract(cfg, pair, 2, s.epsilon, c.lin());
    const auto f2s = fd_extract(cfg, {pair[1], pair[0]}, 2, s.epsilon, c.lin());
    const double d = (f2.measurement(3) - d2.measurement(3)).sup_norm();
    const auto a = f2.measurement(3), b = f2s.measurement(3);
    bool same = true;
    for (std::size_t i = 0; i < a.size(); ++i) same = same && a[i] == b[i];
    c.rep.metrics["order2_discrepancy"] = d;
    c.save("u12.mfgf", d2.u.at(3));
    c.rep.check_at_most("order2_fd_vs_direct", d, 100.0 * s.epsilon);
    c.rep.check_true("order2_swap_symmetry", same, "bitwise equality under probe swap");
  }
}

void cmd_recover_f(Context& c) {
  const Scenario& s = c.s;
  const MfgConfig cfg = s.config();
  const ProbePlan plan = s.plan();
  const auto data = order1_data(c, cfg, plan.probes);
  const ScalarField G1 = s.G_coefficient(1);
  ErrorTable table;

  ScalarField F1 = ScalarField(cfg.grid());
  if (s.time_basis > 1 || s.running_cost_time_dependent()) {
    auto r = recover_F1_timedep(data, G1, plan, s.time());
    const SpaceTimeField truth = s.F_coefficient_spacetime(1);
    const double err = relative_l2_error(*r.F_time, truth);
    record(c.rep, "F1", r);
    c.rep.metrics["F1"]["relative_l2_error"] = err;
    c.save("F1.mfgf", *r.F_time);
    c.rep.check_at_most("F1_recovery", err, pipeline_tol(s, 1e-9, 5e-2));
    F1 = r.F_time->slice(0);
  } else {
    const ScalarField truth = s.F_coefficient(1);
    auto r = recover_F1_static(data, G1, plan, s.horizon);
    const double err = relative_l2_error(*r.F, band_limit(truth, plan.cutoff));
    record(c.rep, "F1", r);
    c.rep.metrics["F1"]["relative_l2_error"] = err;
    c.save("F1.mfgf", *r.F);
    c.rep.check_at_most("F1_recovery", err, pipeline_tol(s, 1e-9, 5e-2));
    for (int cut : s.cutoff_sweep) {
      ProbePlan p = plan;
      p.cutoff = cut;
      table.emplace_back(cut, relative_l2_error(*recover_F1_static(data, G1, p, s.horizon).F, truth));
    }
    F1 = *r.F;
    emit_plot_data(c.rep, {{"F1_recovered", *r.F}, {"F1_true", truth}}, table, c.dir);
  }

  if (s.order >= 2 && s.F.size() >= 2) {
    auto d2 = order2_data(c, cfg, {{F1}, {G1}});
    auto r = recover_higher_order(2, d2.lower, d2.data, d2.baseline, HigherOrderTarget::FGivenG,
                                  s.G_coefficient(2), plan, s.horizon);
    const double err = relative_l2_error(*r.F, band_limit(s.F_coefficient(2), plan.cutoff));
    record(c.rep, "F2", r);
    c.rep.metrics["F2"]["relative_l2_error"] = err;
    c.save("F2.mfgf", *r.F);
    c.rep.check_at_most("F2_recovery", err, pipeline_tol(s, 1e-8, 1e-1));
  }
}

void cmd_recover_g(Context& c) {
  const Scenario& s = c.s;
  const MfgConfig cfg = s.config();
  const ProbePlan plan = s.plan();
  if (s.running_cost_time_dependent())
    throw ValidationError("costs.F: recover-g needs a time-independent running cost");
  const auto data = order1_data(c, cfg, plan.probes);
  const ScalarField F1 = s.F_coefficient(1), truth = s.G_coefficient(1);
  auto r = recover_G1(data, F1, plan, s.horizon);
  const double err = relative_l2_error(*r.G, masked_truth(truth, plan.cutoff, r.refused));
  record(c.rep, "G1", r);
  c.rep.metrics["G1"]["relative_l2_error"] = err;
  c.save("G1.mfgf", *r.G);
  c.rep.check_at_most("G1_recovery", err, pipeline_tol(s, 1e-9, 5e-2));
  ErrorTable table;
  for (int cut : s.cutoff_sweep) {
    ProbePlan p = plan;
    p.cutoff = cut;
    table.emplace_back(cut, relative_l2_error(*recover_G1(data, F1, p, s.horizon).G, truth));
  }
  emit_plot_data(c.rep, {{"G1_recovered", *r.G}, {"G1_true", truth}}, table, c.dir);

  if (s.order >= 2 && s.G.size() >= 2) {
    auto d2 = order2_data(c, cfg, {{F1}, {*r.G}});
    auto r2 = recover_higher_order(2, d2.lower, d2.data, d2.baseline, HigherOrderTarget::GGivenF,
                                   s.F_coefficient(2), plan, s.horizon);
    const double e2 = relative_l2_error(*r2.G, masked_truth(s.G_coefficient(2), plan.cutoff, r2.refused));
    record(c.rep, "G2", r2);
    c.rep.metrics["G2"]["relative_l2_error"] = e2;
    c.save("G2.mfgf", *r2.G);
    c.rep.check_at_most("G2_recovery", e2, pipeline_tol(s, 1e-8, 1e-1));
  }
}

void cmd_recover_fg(Context& c) {
  const Scenario& s = c.s;
  const MfgConfig cfg = s.config();
  if (s.running_cost_time_dependent())
    throw ValidationError("costs.F: recover-fg needs a time-independent running cost");
  ProbePlan plan = s.plan();
  std::set<Wavevector> need;
  for (const auto& xi : frequency_box(s.dimension, plan.cutoff)) {
    const auto d = decompose_frequency(xi, s.dimension);
    need.insert(-d.xi2);
    need.insert(-d.xi2p);
  }
  plan.probes.assign(need.begin(), need.end());
  for (const auto& z : plan.probes)
    if (2 * norm_inf(z) >= s.points)
      throw ValidationError("recovery.cutoff: simultaneous probes pass Nyquist; lower the cutoff");
  const auto data = order1_data(c, cfg, plan.probes);
  auto r = recover_FG_simultaneous(data, plan, s.horizon);
  const ScalarField Ft = s.F_coefficient(1), Gt = s.G_coefficient(1);
  const double ef = relative_l2_error(*r.F, band_limit(Ft, plan.cutoff));
  const double eg = relative_l2_error(*r.G, masked_truth(Gt, plan.cutoff, r.refused));
  record(c.rep, "F1G1", r);
  c.rep.metrics["F1G1"]["F_relative_l2_error"] = ef;
  c.rep.metrics["F1G1"]["G_relative_l2_error"] = eg;
  c.save("F1.mfgf", *r.F);
  c.save("G1.mfgf", *r.G);
  emit_plot_data(c.rep, {{"F1_recovered", *r.F}, {"G1_recovered", *r.G}}, {}, c.dir);
  c.rep.check_at_most("F1_recovery", ef, pipeline_tol(s, 1e-9, 5e-2));
  c.rep.check_at_most("G1_recovery", eg, pipeline_tol(s, 1e-9, 5e-2));
}

void add_counterexample(Context& c, const CounterexampleReport& r, bool require_all) {
  auto& j = c.rep.metrics[r.which];
  for (const auto& [k, v] : r.metrics) j[k] = v;
  for (const auto& [k, v] : r.formulas) j["formulas"][k] = v;
  j["flags"] = r.flags;
  auto& checks = j["checks"] = nlohmann::ordered_json::array();
  for (const auto& ck : r.checks) {
    checks.push_back({{"name", ck.name}, {"passed", ck.passed}, {"value", ck.value}, {"threshold", ck.threshold}});
    if (require_all) c.rep.checks.push_back({r.which + "." + ck.name, ck.passed, ck.value, ck.threshold, ck.detail});
  }
  for (const auto& n : r.notes) c.rep.notes.push_back(r.which + ": " + n);
  for (const auto& f : r.flags) c.rep.notes.push_back(r.which + " flag: " + f);
}

void cmd_counterexample(Context& c) {
  const std::string& w = c.opt.which;
  if (w != "all" && w != "terminal" && w != "running" && w != "ode")
    throw ValidationError("--which: expected terminal, running, ode or all");
  if (w == "all" || w == "running") add_counterexample(c, verify_running_cost_pair(), true);
  if (w == "all" || w == "terminal") add_counterexample(c, verify_terminal_cost_pair(), true);
  if (w == "all" || w == "ode") add_counterexample(c, build_time_independent_counterexample(), true);
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"forward",   "measure",    "linearize",
                                              "recover-f", "recover-g",  "recover-fg",
                                              "verify-counterexample", "selftest"};
  return names;
}

fs::path resolve_output_dir(const std::string& command, const Scenario& s, const RunOptions& opt) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  if (!s.output_dir.empty()) return s.output_dir;
  const std::string leaf = command + "-" + s.hash.substr(0, 8);
  if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / leaf;
  return fs::path("mfginv-out") / leaf;
}

RunReport run(const std::string& command, const Scenario& s, const RunOptions& opt) {
  RunReport rep;
  rep.command = command;
  rep.scenario_hash = s.hash;
  const fs::path dir = resolve_output_dir(command, s, opt);
  fs::create_directories(dir);
  Context c{s, opt, dir, rep};
  const auto t0 = std::chrono::steady_clock::now();

  if (command == "forward")
    cmd_forward(c);
  else if (command == "measure")
    cmd_measure(c);
  else if (command == "linearize")
    cmd_linearize(c);
  else if (command == "recover-f")
    cmd_recover_f(c);
  else if (command == "recover-g")
    cmd_recover_g(c);
  else if (command == "recover-fg")
    cmd_recover_fg(c);
  else if (command == "verify-counterexample")
    cmd_counterexample(c);
  else if (command == "selftest")
    run_selftest(s, opt, rep);
  else
    throw ValidationError("unknown command '" + command + "'");

  rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.write(dir);
  return rep;
}

}  // namespace mfginv::harness
