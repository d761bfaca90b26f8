#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "mfginv/errors.hpp"
#include "mfginv/field_io.hpp"
#include "mfginv/spectral.hpp"

using namespace mfginv;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField random_field(const SpatialGrid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n;
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = n(rng);
  return f;
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("mfginv_test_" + name);
}

}  // namespace

TEST(Grid, FrequencyWrapAndIndexInverse) {
  const SpatialGrid g(2, 8);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto xi = g.frequency(i);
    EXPECT_GE(xi[0], -4);
    EXPECT_LT(xi[0], 4);
    EXPECT_EQ(g.spectral_index(xi), i);
  }
  EXPECT_EQ(g.spectral_index({-1, 9, 0}), g.spectral_index({7, 1, 0}));
  EXPECT_FALSE(g.resolves({4, 0, 0}));
  EXPECT_FALSE(g.resolves({-4, 0, 0}));
  EXPECT_TRUE(g.resolves({3, -3, 0}));
}

TEST(Grid, AxisZeroVariesSlowest) {
  const SpatialGrid g(2, 4);
  EXPECT_DOUBLE_EQ(g.coordinate(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(g.coordinate(1, 1), 0.25);
  EXPECT_DOUBLE_EQ(g.coordinate(4, 0), 0.25);
}

TEST(Grid, CanonicalOrderSortedByNormThenLex) {
  const SpatialGrid g(1, 8);
  const auto& order = g.canonical_order();
  ASSERT_EQ(order.size(), 8u);
  std::vector<int> seen;
  for (auto i : order) seen.push_back(g.frequency(i)[0]);
  EXPECT_EQ(seen, (std::vector<int>{0, -1, 1, -2, 2, -3, 3, -4}));
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(SpatialGrid(0, 8), ValidationError);
  EXPECT_THROW(SpatialGrid(4, 8), ValidationError);
  EXPECT_THROW(SpatialGrid(1, 2), ValidationError);
  EXPECT_THROW(TimeGrid(-1.0, 10), ValidationError);
  EXPECT_THROW(TimeGrid(1.0, 1), ValidationError);
}

TEST(Spectral, RoundTripAndParseval) {
  for (int dim = 1; dim <= 3; ++dim) {
    const SpatialGrid g(dim, dim == 3 ? 16 : 32);
    const auto f = random_field(g, 7 + dim);
    const auto s = dft_forward(f);
    EXPECT_LE((dft_inverse_real(s) - f).sup_norm(), 1e-12);
    const double ms = f.l2_norm() * f.l2_norm();
    EXPECT_LE(std::abs(s.energy() - ms) / ms, 1e-12);
  }
}

TEST(Spectral, ZeroModeIsTheMean) {
  const SpatialGrid g(2, 16);
  const auto f = random_field(g, 3);
  EXPECT_NEAR(dft_forward(f).at({0, 0, 0}).real(), f.mean(), 1e-14);
}

TEST(Spectral, PlaneWaveHasOneCoefficient) {
  const SpatialGrid g(2, 16);
  const ComplexField f = ComplexField::sample(g, [](const auto& x) {
    return std::polar(1.0, kTwoPi * (3 * x[0] - 2 * x[1]));
  });
  const auto s = dft_forward(f);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto xi = s.frequency(i);
    const double expect = (xi[0] == 3 && xi[1] == -2) ? 1.0 : 0.0;
    EXPECT_NEAR(std::abs(s[i]), expect, 1e-13);
  }
}

TEST(Spectral, GradientOfSine) {
  const SpatialGrid g(1, 32);
  const auto f = ScalarField::sample(g, [](const auto& x) { return std::sin(kTwoPi * 3 * x[0]); });
  const auto grad = spectral_gradient(f);
  const auto exact = ScalarField::sample(g, [](const auto& x) { return kTwoPi * 3 * std::cos(kTwoPi * 3 * x[0]); });
  EXPECT_LE((grad[0] - exact).sup_norm(), 1e-11);
}

TEST(Spectral, NyquistDroppedFromGradientKeptInLaplacian) {
  const SpatialGrid g(1, 8);
  const auto f = ScalarField::sample(g, [](const auto& x) { return std::cos(kTwoPi * 4 * x[0]); });
  EXPECT_LE(spectral_gradient(f)[0].sup_norm(), 1e-13);
  const auto lap = spectral_laplacian(f);
  EXPECT_NEAR(lap[0], -std::pow(kTwoPi * 4, 2), 1e-9);
}

TEST(Spectral, DivergenceOfGradientMatchesLaplacianBelowNyquist) {
  const SpatialGrid g(2, 16);
  auto f = dft_forward(random_field(g, 11));
  for (std::size_t i = 0; i < f.size(); ++i)
    if (!g.resolves(f.frequency(i))) f[i] = 0.0;
  const auto smooth = dft_inverse_real(f);
  const auto grad = spectral_gradient(smooth);
  const auto a = spectral_divergence(grad);
  const auto b = spectral_laplacian(smooth);
  EXPECT_LE((a - b).sup_norm(), 1e-9 * b.sup_norm());
}

TEST(Spectral, HeatSemigroupExactInSpectrum) {
  const SpatialGrid g(2, 16);
  const auto s = dft_forward(random_field(g, 5));
  const auto a = heat_propagate(heat_propagate(s, 0.004), 0.011);
  const auto b = heat_propagate(s, 0.015);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_LE(std::abs(a[i] - b[i]), 1e-15);
  EXPECT_THROW(heat_propagate(s, -1e-3), ValidationError);
}

TEST(Spectral, HeatEigenfunctionDecay) {
  const SpatialGrid g(1, 64);
  const auto f = ScalarField::sample(g, [](const auto& x) { return std::sin(kTwoPi * 2 * x[0]); });
  const auto h = heat_propagate(f, 0.05);
  const double decay = std::exp(-4 * std::numbers::pi * std::numbers::pi * 4 * 0.05);
  EXPECT_LE((h - decay * f).sup_norm(), 1e-14);
  EXPECT_DOUBLE_EQ(heat_factor(4.0, 0.05), decay);
}

TEST(Spectral, TwoThirdsRule) {
  const SpatialGrid g(1, 12);
  const auto hi = ScalarField::sample(g, [](const auto& x) { return std::cos(kTwoPi * 5 * x[0]); });
  const auto lo = ScalarField::sample(g, [](const auto& x) { return std::cos(kTwoPi * 4 * x[0]); });
  EXPECT_LE(dealias_two_thirds(hi).sup_norm(), 1e-14);
  EXPECT_LE((dealias_two_thirds(lo) - lo).sup_norm(), 1e-14);
}

TEST(FieldIo, BinaryRoundTrip) {
  const SpatialGrid g(2, 8);
  const auto f = random_field(g, 1);
  write_field(tmp("s.mfgf"), f);
  const auto h = read_field_header(tmp("s.mfgf"));
  EXPECT_EQ(h.dim, 2u);
  EXPECT_EQ(h.points_per_axis, 8u);
  EXPECT_FALSE(h.is_complex);
  EXPECT_EQ(std::filesystem::file_size(tmp("s.mfgf")), 64u + 8u * g.size());
  EXPECT_EQ((read_scalar_field(tmp("s.mfgf")) - f).sup_norm(), 0.0);

  const TimeGrid t(0.5, 4);
  const auto st = SpaceTimeField::sample(g, t, [](const auto& x, double tt) { return x[0] + tt; });
  write_field(tmp("st.mfgf"), st);
  const auto back = read_spacetime_field(tmp("st.mfgf"));
  EXPECT_EQ(back.time(), t);
  EXPECT_EQ((back - st).sup_norm(), 0.0);

  ComplexField c(g);
  c[3] = {1.5, -2.0};
  write_field(tmp("c.mfgf"), c);
  EXPECT_EQ(read_complex_field(tmp("c.mfgf"))[3], c[3]);
  EXPECT_THROW(read_scalar_field(tmp("c.mfgf")), ValidationError);
}

TEST(FieldIo, RejectsCorruptFiles) {
  {
    std::ofstream out(tmp("bad.mfgf"), std::ios::binary);
    out << "NOPE";
  }
  EXPECT_THROW(read_field_header(tmp("bad.mfgf")), ValidationError);
  EXPECT_THROW(read_field_header(tmp("does_not_exist.mfgf")), ValidationError);
}

TEST(FieldIo, CsvRowsAndRoundTrip) {
  const SpatialGrid g(1, 64);
  const auto f = random_field(g, 2);
  write_csv(tmp("f.csv"), f);
  std::ifstream in(tmp("f.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x1,value");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 64);
  write_field(tmp("f.mfgf"), f);
  EXPECT_LE((read_csv(tmp("f.csv"), g) - read_scalar_field(tmp("f.mfgf"))).sup_norm(), 1e-15);
}
