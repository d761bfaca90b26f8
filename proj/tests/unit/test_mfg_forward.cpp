#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mfginv/errors.hpp"
#include "mfginv/mfg_solver.hpp"
#include "mfginv/spectral.hpp"

using namespace mfginv;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField wave(const SpatialGrid& g, double a, bool cosine, int k = 1) {
  return ScalarField::sample(g, [=](const auto& x) {
    return a * (cosine ? std::cos(kTwoPi * k * x[0]) : std::sin(kTwoPi * k * x[0]));
  });
}

MfgConfig example(double theta, double T = 0.5, int M = 256) {
  const SpatialGrid g(1, 64);
  MfgConfig cfg{TaylorCost::running_static({wave(g, 0.5, false)}), TaylorCost::terminal({wave(g, 0.3, true)}),
                HamiltonianSeries::quadratic(g), TimeGrid(T, M)};
  cfg.picard.relaxation = theta;
  return cfg;
}
}  // namespace

TEST(MfgForward, ZeroInitialDensityGivesZeroSolution) {
  const auto cfg = example(0.5);
  const auto sol = solve_mfg(cfg, ScalarField(cfg.grid()));
  EXPECT_EQ(sol.u.sup_norm(), 0.0);
  EXPECT_EQ(sol.m.sup_norm(), 0.0);
  EXPECT_EQ(measure(cfg, ScalarField(cfg.grid())).sup_norm(), 0.0);
}

TEST(MfgForward, DecoupledCaseIsHeatFlow) {
  auto cfg = example(0.5);
  cfg.F = TaylorCost::zero(CostKind::RunningStatic, cfg.grid());
  cfg.G = TaylorCost::zero(CostKind::Terminal, cfg.grid());
  const auto m0 = wave(cfg.grid(), 0.02, true, 2);
  const auto sol = solve_mfg(cfg, m0);
  EXPECT_EQ(sol.u.sup_norm(), 0.0);
  for (int k = 0; k < cfg.time.nodes(); ++k)
    EXPECT_LE((sol.m.slice(k) - heat_propagate(m0, cfg.time.node(k))).sup_norm(), 1e-8);
}

TEST(MfgForward, MassConservedAndResidualsSmall) {
  const auto cfg = example(0.5);
  const auto m0 = wave(cfg.grid(), 0.02, true);
  const auto sol = solve_mfg(cfg, m0);
  for (int k = 0; k < cfg.time.nodes(); ++k) EXPECT_LE(std::abs(sol.m.slice(k).mean() - m0.mean()), 1e-8);
  EXPECT_LE(sol.residuals.hjb, 1e-10);
  EXPECT_LE(sol.residuals.fp, 1e-9);
  EXPECT_EQ(sol.residuals.initial, 0.0);
  EXPECT_LE(sol.residuals.terminal, 1e-12);
  const auto again = residual_check(sol, cfg);
  EXPECT_NEAR(again.fp, sol.residuals.fp, 1e-15);
  EXPECT_TRUE(sol.small_data);
}

// With full relaxation the map contracts strongly; theta = 1/2 keeps the
// ratio near 1 - theta plus the coupling strength.
TEST(MfgForward, PicardContraction) {
  const auto m0 = wave(SpatialGrid(1, 64), 0.02, true);
  const auto full = solve_mfg(example(1.0), m0);
  ASSERT_FALSE(full.contraction_ratios.empty());
  for (double r : full.contraction_ratios) EXPECT_LT(r, 0.5);
  const auto half = solve_mfg(example(0.5), m0);
  for (double r : half.contraction_ratios) EXPECT_LT(r, 1.0);
  EXPECT_NEAR(half.contraction_ratios.back(), 0.5, 0.05);
}

TEST(MfgForward, IterationCapRaisesNoConvergence) {
  auto cfg = example(0.5);
  cfg.picard.max_iters = 2;
  try {
    solve_mfg(cfg, wave(cfg.grid(), 0.02, true));
    FAIL() << "expected NoConvergenceError";
  } catch (const NoConvergenceError& e) {
    EXPECT_EQ(e.iterations(), 2);
  }
}

TEST(MfgForward, ValidationNamesKeys) {
  auto cfg = example(0.5);
  cfg.picard.relaxation = 1.5;
  try {
    cfg.validate();
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("relaxation"), std::string::npos);
  }
  cfg = example(0.5);
  cfg.picard.tolerance = -1;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = example(0.5);
  cfg.G = TaylorCost::running_static({ScalarField(cfg.grid())});
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(MfgForward, LargeDataFlagged) {
  const auto cfg = example(0.5);
  const auto sol = solve_mfg(cfg, wave(cfg.grid(), 0.2, true));
  EXPECT_FALSE(sol.small_data);
}

TEST(MfgForward, HjbAndFpStandalone) {
  const auto cfg = example(0.5, 0.2, 64);
  const SpaceTimeField zero(cfg.grid(), cfg.time);
  const auto u = solve_hjb(cfg, zero);
  EXPECT_EQ(u.sup_norm(), 0.0);  // F(., 0) = G(., 0) = 0
  const auto m0 = wave(cfg.grid(), 0.01, false);
  const auto m = solve_fp(cfg, zero, m0);
  EXPECT_LE((m.slice(64) - heat_propagate(m0, 0.2)).sup_norm(), 1e-15);
}
