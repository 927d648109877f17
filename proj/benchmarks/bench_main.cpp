#include <benchmark/benchmark.h>

#include <myopic/entropy.hpp>
#include <myopic/msp.hpp>
#include <myopic/nonergodic.hpp>
#include <myopic/sampler.hpp>
#include <myopic/zoo.hpp>

using namespace myopic;

static void BM_MspBuildSns(benchmark::State& state) {
  const auto z = simple_nonunifilar_source();
  const auto depth = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_msp(z.process, depth).size());
}
BENCHMARK(BM_MspBuildSns)->Arg(16)->Arg(64)->Arg(256);

static void BM_LayeredCurve(benchmark::State& state) {
  const auto z = n_biased_coins(5);
  const auto length = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(myopic_entropy_curve(z, length).values.back());
}
BENCHMARK(BM_LayeredCurve)->Arg(64)->Arg(256);

static void BM_MspOperatorCurve(benchmark::State& state) {
  const auto z = even_process();
  CurveOptions o;
  o.method = CurveMethod::msp_operator;
  for (auto _ : state) benchmark::DoNotOptimize(myopic_entropy_curve(z, 1024, o).values.back());
}
BENCHMARK(BM_MspOperatorCurve);

static void BM_NCoinsClosedForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ncoins_myopic_entropy(n, 256).values.back());
}
BENCHMARK(BM_NCoinsClosedForm)->Arg(3)->Arg(33)->Arg(1001);

static void BM_InfiniteCoins(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(infinite_coins_myopic_entropy(16384).values.back());
}
BENCHMARK(BM_InfiniteCoins);

static void BM_Sample(benchmark::State& state) {
  const auto z = even_process();
  DatasetSpec spec;
  spec.sequence_length = 256;
  spec.sequence_count = 4096;
  spec.seed = 1;
  const auto threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sample_dataset(z, spec, threads).tokens.size());
  state.SetItemsProcessed(state.iterations() * 256 * 4096);
}
BENCHMARK(BM_Sample)->Arg(1)->Arg(4)->UseRealTime();
BENCHMARK_MAIN();
