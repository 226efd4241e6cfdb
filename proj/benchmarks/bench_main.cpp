#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "failsafe/montecarlo.hpp"
#include "failsafe/normal.hpp"
#include "failsafe/nr_distribution.hpp"
#include "failsafe/rng.hpp"

using namespace failsafe;

static void BM_HalfNormalDraw(benchmark::State& state) {
  Rng rng(kDefaultSeed);
  const HalfNormalParams p;
  for (auto _ : state) benchmark::DoNotOptimize(sample_half_normal(p, rng));
}
BENCHMARK(BM_HalfNormalDraw);

static void BM_NrPdf(benchmark::State& state) {
  const NrDistribution d(static_cast<Approach>(state.range(0)), 15);
  double n = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nr_pdf(n, d));
    n = n < 200.0 ? n + 0.37 : 0.0;
  }
}
BENCHMARK(BM_NrPdf)->Arg(0)->Arg(1);

static void BM_NrCdf(benchmark::State& state) {
  const NrDistribution d(static_cast<Approach>(state.range(0)), 15);
  double n = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nr_cdf(n, d));
    n = n < 200.0 ? n + 0.37 : 0.0;
  }
}
BENCHMARK(BM_NrCdf)->Arg(0)->Arg(1);

static void BM_NrCf(benchmark::State& state) {
  const NrDistribution d(static_cast<Approach>(state.range(0)), 15);
  double t = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(nr_cf(t, d));
    t = t < 1.0 ? t + 0.013 : -1.0;
  }
}
BENCHMARK(BM_NrCf)->Arg(0)->Arg(1);

static void BM_SimulateNr(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const long long reps = 100000;
  for (auto _ : state) {
    auto b = simulate_nr(k, 0.05, reps, kDefaultSeed, Regime::NrFolded, {.workers = 1});
    benchmark::DoNotOptimize(b.values.data());
  }
  state.SetItemsProcessed(state.iterations() * reps * k);
}
BENCHMARK(BM_SimulateNr)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_KsStatistic(benchmark::State& state) {
  const auto b = simulate_half_normal_sums(20, state.range(0), kDefaultSeed);
  const double mu = 20 * normal::kSqrt2OverPi;
  const double sigma = std::sqrt(20 * normal::kHalfNormalVarFactor);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks_statistic(b, [&](double x) { return normal::cdf((x - mu) / sigma); }));
  }
}
BENCHMARK(BM_KsStatistic)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
