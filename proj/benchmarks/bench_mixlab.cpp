#include <benchmark/benchmark.h>

#include "mixlab/analysis.hpp"
#include "mixlab/large_deviation.hpp"

using namespace mixlab;

static void BM_DenseSweepTvSep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto chain = example1(n).chain;
  for (auto _ : state) {
    auto curves = distance_curves(chain, {Metric::tv(), Metric::separation()}, 10 * static_cast<std::size_t>(n));
    benchmark::DoNotOptimize(curves);
  }
  state.SetLabel(std::to_string(chain.size()) + " states");
}
BENCHMARK(BM_DenseSweepTvSep)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

static void BM_HittingPmf(benchmark::State& state) {
  const auto ex = example2(static_cast<int>(state.range(0)));
  const auto a = ex.state("a");
  const std::vector<std::size_t> z{ex.state("z")};
  for (auto _ : state) benchmark::DoNotOptimize(hitting_distribution(ex.chain, a, z));
}
BENCHMARK(BM_HittingPmf)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

static void BM_Psi(benchmark::State& state) {
  double s = 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(psi(s));
    s = s > 11.0 ? 1.5 : s + 0.37;
  }
}
BENCHMARK(BM_Psi);

static void BM_SolveSM(benchmark::State& state) {
  const double M = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_sM(M));
}
BENCHMARK(BM_SolveSM)->Arg(10)->Arg(100);

static void BM_VerifySuiteSubset(benchmark::State& state) {
  SuiteOptions o;
  o.chains = 20;
  o.bd_chains = 20;
  o.only = {"tv_sep", "cauchy"};
  for (auto _ : state) benchmark::DoNotOptimize(run_verify_suite(o));
}
BENCHMARK(BM_VerifySuiteSubset)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
