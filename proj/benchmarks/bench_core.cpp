#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "mfginv/linearization.hpp"
#include "mfginv/mfg_solver.hpp"
#include "mfginv/parabolic.hpp"
#include "mfginv/recovery.hpp"
#include "mfginv/spectral.hpp"

using namespace mfginv;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ScalarField wave(const SpatialGrid& g, double a, int k) {
  return ScalarField::sample(g, [=](const auto& x) { return a * std::sin(kTwoPi * k * x[0]); });
}

MfgConfig config(int n, int steps) {
  const SpatialGrid g(1, n);
  return MfgConfig{TaylorCost::running_static({wave(g, 0.5, 1)}), TaylorCost::terminal({wave(g, 0.3, 1)}),
                   HamiltonianSeries::quadratic(g), TimeGrid(0.1, steps)};
}

void BM_DftRoundTrip(benchmark::State& st) {
  const int dim = static_cast<int>(st.range(0)), n = static_cast<int>(st.range(1));
  const SpatialGrid g(dim, n);
  const auto f = ScalarField::sample(g, [](const auto& x) { return std::sin(kTwoPi * (x[0] + x[1] + x[2])); });
  for (auto _ : st) benchmark::DoNotOptimize(dft_inverse_real(dft_forward(f)));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_DftRoundTrip)->Args({1, 64})->Args({1, 1024})->Args({2, 64})->Args({3, 32});

void BM_HeatSolve(benchmark::State& st) {
  const SpatialGrid g(1, static_cast<int>(st.range(0)));
  ParabolicProblem p(wave(g, 1.0, 3), TimeGrid(0.1, static_cast<int>(st.range(1))));
  for (auto _ : st) benchmark::DoNotOptimize(solve_parabolic(p));
}
BENCHMARK(BM_HeatSolve)->Args({64, 256})->Args({64, 512})->Args({256, 512});

void BM_ForwardMfg(benchmark::State& st) {
  const auto cfg = config(static_cast<int>(st.range(0)), static_cast<int>(st.range(1)));
  const auto m0 = wave(cfg.grid(), 0.02, 1);
  for (auto _ : st) benchmark::DoNotOptimize(solve_mfg(cfg, m0));
}
BENCHMARK(BM_ForwardMfg)->Args({64, 256})->Args({128, 256})->Unit(benchmark::kMillisecond);

void BM_LinearizeDirect(benchmark::State& st) {
  const auto cfg = config(64, 256);
  const std::vector<ScalarField> probes{wave(cfg.grid(), 1.0, 1), wave(cfg.grid(), 1.0, 2)};
  const int order = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(linearize_direct(cfg, probes, order));
}
BENCHMARK(BM_LinearizeDirect)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_FdExtractOrder2(benchmark::State& st) {
  const auto cfg = config(64, 256);
  const std::vector<ScalarField> probes{wave(cfg.grid(), 1.0, 1), wave(cfg.grid(), 1.0, 2)};
  LinearizationOptions opt;
  opt.threads = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(fd_extract(cfg, probes, 2, 1e-3, opt));
}
BENCHMARK(BM_FdExtractOrder2)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SimultaneousRecovery(benchmark::State& st) {
  const SpatialGrid g(1, 64);
  const double T = 0.1;
  const auto F = wave(g, 1.0, 1), G = wave(g, 0.5, 2);
  ProbePlan plan;
  plan.cutoff = static_cast<int>(st.range(0));
  for (int z = -plan.cutoff - 4; z <= plan.cutoff + 4; ++z) plan.probes.push_back({z, 0, 0});
  ProbeResponses data;
  for (const auto& z : plan.probes) data.emplace(z, synthesize_order1(F, G, z, T));
  for (auto _ : st) benchmark::DoNotOptimize(recover_FG_simultaneous(data, plan, T));
}
BENCHMARK(BM_SimultaneousRecovery)->Arg(4)->Arg(8);

void BM_GramCheck(benchmark::State& st) {
  const SpatialGrid g(1, 32);
  const int cutoff = static_cast<int>(st.range(0));
  std::vector<Wavevector> probes;
  for (int z = -cutoff; z <= cutoff; ++z) probes.push_back({z, 0, 0});
  for (auto _ : st) benchmark::DoNotOptimize(gram_injectivity_check(probes, cutoff, 0.1, g));
}
BENCHMARK(BM_GramCheck)->Arg(4)->Arg(8);

}  // namespace

// Linked against benchmark rather than benchmark_main, whose packaged
// archive carries LTO objects from another compiler release.
BENCHMARK_MAIN();
