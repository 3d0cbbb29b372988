#include <benchmark/benchmark.h>

#include "mbrb/battery.hpp"
#include "mbrb/oracle.hpp"
#include "mbrb/params.hpp"
#include "mbrb/scenario.hpp"
#include "mbrb/sweep.hpp"

using namespace mbrb;

static void BM_MbrbConfigs(benchmark::State& state) {
  const auto sys = SystemParams::make(100, 10, 20, 100);
  for (auto _ : state) benchmark::DoNotOptimize(mbrb_configs(MbrbAlgorithm::bracha, sys));
}
BENCHMARK(BM_MbrbConfigs);

static void BM_Sweep(benchmark::State& state) {
  const auto algo = state.range(0) ? MbrbAlgorithm::imbs_raynal : MbrbAlgorithm::bracha;
  for (auto _ : state) benchmark::DoNotOptimize(sweep(100, algo, 0, 33, 0, 49));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Simulate(benchmark::State& state) {
  const auto s = load_scenario(MBRB_FIXTURES "/bracha_n8_equivocator.json");
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_to_quiescence(s, seed++));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMicrosecond);

static void BM_Battery(benchmark::State& state) {
  const auto s = load_scenario(MBRB_FIXTURES "/bracha_n8_equivocator.json");
  const auto seeds = seed_range(1, 64);
  for (auto _ : state) benchmark::DoNotOptimize(run_battery(s, seeds, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_Battery)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_OracleSf(benchmark::State& state) {
  const auto s = load_scenario(MBRB_FIXTURES "/sf_n4_oracle.json");
  for (auto _ : state) benchmark::DoNotOptimize(exhaustive_oracle(s));
}
BENCHMARK(BM_OracleSf)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
