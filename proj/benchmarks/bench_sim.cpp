#include <benchmark/benchmark.h>

#include "teleop/simulation.hpp"

using namespace teleop;

namespace {

void BM_Tick(benchmark::State& state) {
  ScenarioConfig c;
  c.run_case = static_cast<RunCase>(state.range(0));
  c.duration = 1e6;
  c.stop_at_finish = false;
  TeleopSimulation sim(c);
  for (auto _ : state) benchmark::DoNotOptimize(sim.tick());
}
BENCHMARK(BM_Tick)->DenseRange(0, 2);

void BM_RunTrackA(benchmark::State& state) {
  ScenarioConfig c;
  c.run_case = RunCase::kDelayed;
  for (auto _ : state) benchmark::DoNotOptimize(run_case(c).report);
}
BENCHMARK(BM_RunTrackA)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
