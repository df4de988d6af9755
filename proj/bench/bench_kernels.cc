// Serial reference against the OpenMP kernels. The two paths give bitwise
// identical rows (see test_analysis), so only wall time differs.

#include <benchmark/benchmark.h>

#include "piezo/analysis.h"
#include "piezo/kernels.h"

namespace {

using piezo::Execution;

void Sweep(benchmark::State& state, Execution exec) {
  const std::vector<int> orders = {12, 16, 20, 24, 28, 32, 36, 40};
  for (auto _ : state) {
    auto rows = piezo::convergence_sweep({piezo::Scheme::kFem, piezo::Scheme::kMfem}, orders,
                                         piezo::PhysicalSetup{}, piezo::FemVariant::kStandard,
                                         exec);
    benchmark::DoNotOptimize(rows);
  }
  state.counters["workers"] = exec == Execution::kParallel ? piezo::worker_count() : 1;
}

void SweepSerial(benchmark::State& state) { Sweep(state, Execution::kSerial); }
void SweepParallel(benchmark::State& state) { Sweep(state, Execution::kParallel); }

BENCHMARK(SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
