// Serial reference path against the OpenMP path of the Monte Carlo runner,
// plus single-solve timings of the kernels it is built from.
#include <benchmark/benchmark.h>

#include "crs/baselines.hpp"
#include "crs/harness.hpp"
#include "crs/relay.hpp"
#include "crs/sca.hpp"

namespace {

crs::harness::Scenario bench_scenario(int trials) {
  return crs::harness::parse_scenario(R"({
    "name": "bench",
    "num_users": 3,
    "num_tx_antennas": 2,
    "bs_variances": [1.0, 0.3, 0.1],
    "sweep": {"kind": "snr_db", "values": [10, 20]},
    "strategies": ["CRS-SCA", "NRS", "SDMA"],
    "protocols": ["1-best"],
    "trials": )" + std::to_string(trials) + "}");
}

void BM_RunScenario(benchmark::State& state) {
  const auto scenario = bench_scenario(static_cast<int>(state.range(1)));
  const crs::harness::RunOptions options{state.range(0) != 0};
  for (auto _ : state) benchmark::DoNotOptimize(crs::harness::run_scenario(scenario, options));
  state.SetLabel(options.parallel ? "openmp" : "serial");
}
BENCHMARK(BM_RunScenario)->ArgsProduct({{0, 1}, {2, 4}})->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_GridBaseline(benchmark::State& state) {
  const auto cfg = crs::SystemConfig::standard(3, 2, 20.0, {1.0, 0.3, 0.1});
  const auto ch = crs::generate_channels(cfg, 1);
  const auto g = crs::select_centralized(ch, 1);
  for (auto _ : state) benchmark::DoNotOptimize(crs::solve_crs_grid(ch, g, cfg, 0.1));
}
BENCHMARK(BM_GridBaseline)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ScaSolve(benchmark::State& state) {
  const auto cfg = crs::SystemConfig::standard(3, static_cast<int>(state.range(0)), 20.0, {1.0, 0.3, 0.1});
  const auto ch = crs::generate_channels(cfg, 1);
  const auto g = crs::select_centralized(ch, 1);
  for (auto _ : state) benchmark::DoNotOptimize(crs::sca_solve(ch, &g, cfg));
}
BENCHMARK(BM_ScaSolve)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Subproblem(benchmark::State& state) {
  const auto cfg = crs::SystemConfig::standard(3, 2, 20.0, {1.0, 0.3, 0.1});
  const auto ch = crs::generate_channels(cfg, 1);
  const auto g = crs::select_centralized(ch, 1);
  const auto sub = crs::assemble_subproblem(crs::initialize(ch, &g, cfg), ch, &g, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(crs::conic::solve(sub.problem));
}
BENCHMARK(BM_Subproblem)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
