#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mfginv/errors.hpp"
#include "mfginv/frequency.hpp"
#include "mfginv/recovery.hpp"
#include "mfginv/spectral.hpp"

using namespace mfginv;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double k4Pi2 = 4.0 * kPi * kPi;

ScalarField trig(const SpatialGrid& g, double a, double b, int k) {
  return ScalarField::sample(g, [=](const auto& x) {
    return a * std::sin(kTwoPi * k * x[0]) + b * std::cos(kTwoPi * k * x[0]);
  });
}

// Composite Simpson on [0, T], independent of the closed forms under test.
template <class Fn>
double simpson(Fn f, double T, int n = 20000) {
  const double h = T / n;
  double s = f(0.0) + f(T);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

ProbeResponses synth(const ScalarField& F, const ScalarField& G, const std::vector<Wavevector>& zs, double T) {
  ProbeResponses d;
  for (const auto& z : zs) d.emplace(z, synthesize_order1(F, G, z, T));
  return d;
}

std::vector<Wavevector> line(int lo, int hi) {
  std::vector<Wavevector> v;
  for (int z = lo; z <= hi; ++z) v.push_back({z, 0, 0});
  return v;
}
}  // namespace

TEST(Frequency, DuhamelWeightAndMoments) {
  EXPECT_EQ(duhamel_weight(0.0, 0.7), 0.7);
  EXPECT_NEAR(duhamel_weight(1e-14, 0.7), 0.7, 1e-12);
  for (double K : {0.5, 1.0, 5.0}) {
    const double lam = k4Pi2 * K, T = 0.3;
    EXPECT_NEAR(duhamel_weight(K, T), simpson([&](double s) { return std::exp(-lam * s); }, T), 1e-12);
    for (int p : {0, 1, 2, 3})
      EXPECT_NEAR(cosine_moment(lam, p, T),
                  simpson([&](double s) { return std::exp(-lam * s) * std::cos(p * kPi * s / T); }, T), 1e-11);
  }
  EXPECT_NEAR(cosine_moment(k4Pi2 * 2.0, 0, 0.3), duhamel_weight(2.0, 0.3), 1e-16);
}

TEST(Frequency, ExpIntegralsAcrossSeriesSwitch) {
  for (double lam : {0.0, 1e-4, 0.05, 0.2, 30.0})
    for (double h : {1e-3, 0.5}) {
      EXPECT_NEAR(exp_integral0(lam, h), simpson([&](double s) { return std::exp(-lam * s); }, h), 1e-13);
      EXPECT_NEAR(exp_integral1(lam, h), simpson([&](double s) { return s * std::exp(-lam * s); }, h), 1e-13);
    }
}

TEST(Frequency, BoxOrderAndSize) {
  EXPECT_EQ(frequency_box(1, 2).size(), 5u);
  EXPECT_EQ(frequency_box(2, 2).size(), 25u);
  EXPECT_EQ(frequency_box(3, 1).size(), 27u);
  const auto b = frequency_box(1, 2);
  EXPECT_EQ(b.front(), (Wavevector{0, 0, 0}));
  EXPECT_EQ(b[1], (Wavevector{-1, 0, 0}));
}

// Property: the axis split satisfies all four conditions everywhere in the box.
TEST(Frequency, DecompositionValidForEveryFrequency) {
  for (int dim = 1; dim <= 3; ++dim)
    for (const auto& xi : frequency_box(dim, dim == 3 ? 2 : 5)) {
      const auto d = decompose_frequency(xi, dim);
      EXPECT_TRUE(decomposition_valid(xi, d)) << to_string(xi, dim);
      EXPECT_EQ(d.xi2[1], 0);
      EXPECT_EQ(d.xi2[2], 0);
      const auto m = decompose_frequency(-xi, dim);
      EXPECT_EQ(d.S, m.S);
      EXPECT_EQ(d.Sp, m.Sp);
    }
  const auto d = decompose_frequency({-2, 0, 0}, 1);
  EXPECT_EQ(d.xi2, (Wavevector{-1, 0, 0}));
  EXPECT_EQ(d.xi1, (Wavevector{-1, 0, 0}));
  EXPECT_EQ(d.S, 2);
  EXPECT_EQ(d.Sp, 10);
}

TEST(Synthesis, MatchesClosedFormPlaneWave) {
  const SpatialGrid g(1, 32);
  const double T = 0.2;
  const auto F = trig(g, 1.0, 0.0, 1), G = trig(g, 0.0, 1.0, 2);
  const auto u = synthesize_order1(F, G, {0, 0, 0}, T);
  const double c1 = (1 - std::exp(-k4Pi2 * T)) / k4Pi2, e2 = std::exp(-k4Pi2 * 4 * T);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(u[i].real(), c1 * F[i] + e2 * G[i], 1e-15);
    EXPECT_NEAR(u[i].imag(), 0.0, 1e-15);
  }
}

// The constant probe is propagated exactly by the solver, so direct
// linearization reproduces the synthesized data to roundoff.
TEST(Synthesis, ConstantProbeAgreesWithDirectSolver) {
  const SpatialGrid g(1, 32);
  const double T = 0.2;
  const auto F = trig(g, 0.5, 0.2, 1), G = trig(g, 0.3, 0.0, 2);
  MfgConfig cfg{TaylorCost::running_static({F}), TaylorCost::terminal({G}), HamiltonianSeries::quadratic(g),
                TimeGrid(T, 64)};
  const auto direct = linearize_direct(cfg, {ScalarField::constant(g, 1.0)}, 1).measurement(1);
  const auto syn = real_part(synthesize_order1(F, G, {0, 0, 0}, T));
  EXPECT_LE((direct - syn).sup_norm(), 1e-13);
}

TEST(Recovery, StaticFAndGRoundTrip) {
  const SpatialGrid g(1, 64);
  const double T = 0.1;
  const auto F = trig(g, 1.0, 0.3, 1) + trig(g, 0.2, -0.4, 5);
  const auto G = trig(g, 0.0, 0.5, 1);
  ProbePlan plan;
  plan.cutoff = 8;
  plan.probes = line(-9, 9);
  const auto data = synth(F, G, plan.probes, T);
  EXPECT_LE(relative_l2_error(*recover_F1_static(data, G, plan, T).F, F), 1e-9);
  const auto rg = recover_G1(data, F, plan, T);
  EXPECT_LE(relative_l2_error(*rg.G, G), 1e-9);
  EXPECT_EQ(rg.max_admissible_cutoff, 2);
  EXPECT_FALSE(rg.refused.empty());
}

TEST(Recovery, SimultaneousRoundTrip) {
  const SpatialGrid g(1, 64);
  const double T = 0.1;
  const auto F = trig(g, 1.0, 0.3, 1) + trig(g, 0.0, 0.3, 2);
  const auto G = trig(g, 0.0, 0.5, 1);
  ProbePlan plan;
  plan.cutoff = 8;
  plan.probes = line(-12, 12);
  const auto r = recover_FG_simultaneous(synth(F, G, plan.probes, T), plan, T);
  EXPECT_LE(relative_l2_error(*r.F, F), 1e-9);
  EXPECT_LE(relative_l2_error(*r.G, G), 1e-9);
}

TEST(Recovery, SimultaneousNeedsProbes) {
  const SpatialGrid g(1, 32);
  ProbePlan plan;
  plan.cutoff = 2;
  plan.probes = {{0, 0, 0}};
  const auto data = synth(ScalarField(g), ScalarField(g), plan.probes, 0.1);
  EXPECT_THROW(recover_FG_simultaneous(data, plan, 0.1), InsufficientProbes);
}

TEST(Recovery, InsufficientProbesListsMissing) {
  const SpatialGrid g(1, 16);
  ProbePlan plan;
  plan.cutoff = 4;
  plan.probes = {{5, 0, 0}};
  const auto data = synth(ScalarField(g), ScalarField(g), plan.probes, 0.1);
  try {
    recover_F1_static(data, ScalarField(g), plan, 0.1);
    FAIL() << "expected InsufficientProbes";
  } catch (const InsufficientProbes& e) {
    std::vector<Wavevector> expect{{3, 0, 0}, {4, 0, 0}};
    EXPECT_EQ(e.missing(), expect);
  }
}

TEST(Recovery, CutoffPolicy) {
  EXPECT_EQ(max_admissible_cutoff(1, 0.1), 2);
  EXPECT_GE(max_admissible_cutoff(1, 0.01), 8);
  const SpatialGrid g(1, 64);
  ProbePlan plan;
  plan.cutoff = 8;
  plan.probes = {{0, 0, 0}};
  plan.policy = CutoffPolicy::Strict;
  const auto data = synth(ScalarField(g), trig(g, 1, 0, 1), plan.probes, 0.1);
  try {
    recover_G1(data, ScalarField(g), plan, 0.1);
    FAIL() << "expected CutoffTooAggressive";
  } catch (const CutoffTooAggressive& e) {
    EXPECT_EQ(e.max_admissible(), 2);
  }
  plan.policy = CutoffPolicy::Clamp;
  const auto r = recover_G1(data, ScalarField(g), plan, 0.1);
  for (const auto& xi : r.refused) EXPECT_GT(norm_inf(xi), 2);
  EXPECT_EQ(r.refused.size(), 12u);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Recovery, ZeroDataGivesZeroCoefficients) {
  const SpatialGrid g(1, 32);
  ProbePlan plan;
  plan.cutoff = 3;
  plan.probes = line(-2, 2);
  const auto data = synth(ScalarField(g), ScalarField(g), plan.probes, 0.1);
  EXPECT_EQ(recover_F1_static(data, ScalarField(g), plan, 0.1).F->sup_norm(), 0.0);
  plan.time_basis = 2;
  plan.tikhonov = 1e-6;
  EXPECT_EQ(recover_F1_timedep(data, ScalarField(g), plan, TimeGrid(0.1, 16)).F_time->sup_norm(), 0.0);
}

// Horizon 0.02: long enough that F varies in time, short enough that the
// cosine truncation is not swamped by the moment conditioning.
TEST(Recovery, TimeDependentMomentInversion) {
  const SpatialGrid g(1, 64);
  const double T = 0.02;
  const TimeGrid tg(T, 400);
  const auto F = SpaceTimeField::sample(g, tg, [](const auto& x, double t) { return std::sin(kTwoPi * x[0]) * (1 + t); });
  const auto G = ScalarField(g);
  ProbePlan plan;
  plan.cutoff = 1;
  plan.time_basis = 3;
  plan.tikhonov = 1e-8;
  plan.probes = line(0, 5);
  ProbeResponses data;
  for (const auto& z : plan.probes) data.emplace(z, synthesize_order1(F, G, z));
  const auto r = recover_F1_timedep(data, G, plan, tg);
  const double err = relative_l2_error(*r.F_time, F);
  EXPECT_LE(err, 5e-2);
  ASSERT_FALSE(r.frequencies.empty());
  for (const auto& f : r.frequencies) EXPECT_GE(f.condition, 1.0);
  EXPECT_GE(r.max_condition, 1.0);

  // The time basis must beat the best static fit, otherwise nothing was resolved.
  plan.time_basis = 1;
  const double static_err = relative_l2_error(*recover_F1_timedep(data, G, plan, tg).F_time, F);
  EXPECT_LT(err, 0.5 * static_err);

  plan.time_basis = 7;
  EXPECT_THROW(recover_F1_timedep(data, G, plan, tg), InsufficientProbes);
}

TEST(Recovery, TimeDependentConditionWarning) {
  const SpatialGrid g(1, 16);
  const TimeGrid tg(1.0, 64);
  ProbePlan plan;
  plan.cutoff = 1;
  plan.time_basis = 4;
  plan.condition_threshold = 10.0;
  plan.probes = line(0, 5);
  ProbeResponses data;
  const SpaceTimeField F(g, tg);
  for (const auto& z : plan.probes) data.emplace(z, synthesize_order1(F, ScalarField(g), z));
  const auto r = recover_F1_timedep(data, ScalarField(g), plan, tg);
  EXPECT_GT(r.max_condition, 10.0);
  EXPECT_FALSE(r.notes.empty());
}

TEST(Recovery, HigherOrderSynthetic) {
  const SpatialGrid g(1, 64);
  const double T = 0.1;
  const auto F2 = trig(g, 0.7, 0.1, 1), G2 = trig(g, 0.0, 0.4, 1);
  ProbePlan plan;
  plan.cutoff = 4;
  std::vector<OrderKDatum> data;
  for (int a = -3; a <= 3; ++a)
    for (int b : {0, 1}) {
      ProductProbe p{{{a, 0, 0}, {b, 0, 0}}};
      data.push_back({p, synthesize_plane_response(F2, G2, p.shift(), p.rate(), T)});
    }
  const LowerOrderCoefficients zero{{ScalarField(g)}, {ScalarField(g)}};
  const auto rf = recover_higher_order(2, zero, data, {}, HigherOrderTarget::FGivenG, G2, plan, T);
  EXPECT_LE(relative_l2_error(*rf.F, F2), 1e-8);
  plan.cutoff = 2;
  const auto rg = recover_higher_order(2, zero, data, {}, HigherOrderTarget::GGivenF, F2, plan, T);
  EXPECT_LE(relative_l2_error(*rg.G, G2), 1e-8);
  const auto rs = recover_higher_order(2, zero, data, {}, HigherOrderTarget::Simultaneous, std::nullopt, plan, T);
  EXPECT_LE(relative_l2_error(*rs.F, F2), 1e-8);
  EXPECT_LE(relative_l2_error(*rs.G, G2), 1e-8);

  const LowerOrderCoefficients nonzero{{F2}, {ScalarField(g)}};
  EXPECT_THROW(recover_higher_order(2, nonzero, data, {}, HigherOrderTarget::FGivenG, G2, plan, T),
               ValidationError);
  EXPECT_THROW(recover_higher_order(2, {}, data, {}, HigherOrderTarget::FGivenG, G2, plan, T), ValidationError);
}

// Lower orders nonzero: the baseline removes their contribution, and with
// constant probes the solver data are exact.
TEST(Recovery, HigherOrderWithDirectBaseline) {
  const SpatialGrid g(1, 32);
  const double T = 0.1;
  const auto F1 = trig(g, 0.5, 0.0, 1), G1 = trig(g, 0.0, 0.3, 1);
  const auto F2 = trig(g, 0.0, 0.2, 1), G2 = trig(g, 0.1, 0.0, 1);
  MfgConfig cfg{TaylorCost::running_static({F1, F2}), TaylorCost::terminal({G1, G2}),
                HamiltonianSeries::quadratic(g), TimeGrid(T, 64)};
  const ProductProbe pp{{{0, 0, 0}, {0, 0, 0}}};
  const auto resp = complex_response(pp, g, direct_measure(cfg));
  const LowerOrderCoefficients lower{{F1}, {G1}};
  ProbePlan plan;
  plan.cutoff = 2;
  const auto r = recover_higher_order(2, lower, {{pp, resp}}, make_direct_baseline(cfg, lower, 2),
                                      HigherOrderTarget::FGivenG, G2, plan, T);
  EXPECT_LE(relative_l2_error(*r.F, F2), 1e-10);
}

TEST(Recovery, ComplexResponseAssemblesPlaneWaves) {
  const SpatialGrid g(1, 16);
  const RealMeasure product = [](const std::vector<ScalarField>& fs) {
    ScalarField out = fs[0];
    for (std::size_t i = 1; i < fs.size(); ++i) out.multiply(fs[i]);
    return out;
  };
  const ProductProbe pp{{{1, 0, 0}, {2, 0, 0}, {0, 0, 0}}};
  const auto c = complex_response(pp, g, product);
  for (std::size_t i = 0; i < g.size(); ++i)
    EXPECT_LE(std::abs(c[i] - std::polar(1.0, kTwoPi * 3 * g.coordinate(i, 0))), 1e-14);
  EXPECT_EQ(pp.shift(), (Wavevector{3, 0, 0}));
  EXPECT_EQ(pp.rate(), 5.0);
}

TEST(Recovery, PairingExtractsFourierCoefficient) {
  const SpatialGrid g(1, 32);
  const auto f = to_complex(trig(g, 0.0, 2.0, 3));
  EXPECT_NEAR(std::abs(pairing_datum(f, dual_plane_wave(g, {3, 0, 0})) - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(pairing_datum(f, dual_plane_wave(g, {2, 0, 0}))), 0.0, 1e-14);
}

TEST(Recovery, PointwiseG) {
  const SpatialGrid g(1, 32);
  const double T = 0.05;
  const auto G = trig(g, 0.3, 0.1, 1);
  const auto m1T = ScalarField::sample(g, [](const auto& x) { return 1.0 + 0.5 * std::cos(kTwoPi * x[0]); });
  const auto gm = G;
  auto prod = gm;
  prod.multiply(m1T);
  const auto u0 = heat_propagate(prod, T);
  ProbePlan plan;
  plan.cutoff = 3;
  const auto r = recover_G1_pointwise(u0, ScalarField(g), m1T, plan, T);
  // Roundoff is amplified by exp(4 pi^2 Xi^2 T) ~ 5e7 during heat inversion.
  const double amp = std::exp(k4Pi2 * 9 * T);
  EXPECT_LE(relative_l2_error(*r.G, G), 100 * amp * 1e-16);
  plan.division_floor = 1.2;
  const auto masked = recover_G1_pointwise(u0, ScalarField(g), m1T, plan, T);
  EXPECT_FALSE(masked.notes.empty());
}

TEST(Recovery, GramInjectivity) {
  const SpatialGrid g(1, 32);
  const auto probes = line(-4, 4);
  const auto full = gram_injectivity_check(probes, 4, 1.0, g);
  EXPECT_GT(full.min_singular_value, 0.0);
  EXPECT_EQ(full.rows, 9);
  EXPECT_EQ(full.cols, 9);
  auto fewer = probes;
  fewer.erase(fewer.begin() + 3);
  const auto cut = gram_injectivity_check(fewer, 4, 1.0, g);
  EXPECT_EQ(cut.min_singular_value, 0.0);
  ASSERT_EQ(cut.null_vector.size(), 9u);
}

TEST(Recovery, GeneralHamiltonianOperatorAssembly) {
  const SpatialGrid g(1, 16);
  const double T = 0.1;
  const auto F1 = trig(g, 0.4, 0.2, 1), G1 = trig(g, 0.0, 0.3, 1);
  MfgConfig cfg{TaylorCost::running_static({F1}), TaylorCost::terminal({G1}),
                HamiltonianSeries::from_terms(g, 2, {{{1, 0, 0}, ScalarField::constant(g, 0.5)},
                                                     {{2, 0, 0}, ScalarField::constant(g, 1.0)}}),
                TimeGrid(T, 64)};
  const std::vector<ScalarField> probes{ScalarField::constant(g, 1.0), trig(g, 0, 1, 1)};
  const auto lin = linearize_direct(cfg, probes, 1);
  const std::vector<ScalarField> data{lin.measurement(1), lin.measurement(2)};
  const auto rf = recover_F1_general(cfg, probes, data, 2);
  EXPECT_LE(relative_l2_error(rf.coefficient, F1), 1e-10);
  EXPECT_EQ(rf.basis_size, 5);
  const auto rg = recover_G1_general(cfg, probes, data, 1);
  EXPECT_LE(relative_l2_error(rg.coefficient, G1), 1e-8);
}

TEST(Recovery, BandLimit) {
  const SpatialGrid g(1, 32);
  const auto f = trig(g, 1, 0, 1) + trig(g, 0, 1, 6);
  EXPECT_LE((band_limit(f, 3) - trig(g, 1, 0, 1)).sup_norm(), 1e-14);
}
