#include "ancestral/counterexample.hpp"
#include "ancestral/coupling.hpp"

#include <benchmark/benchmark.h>

using namespace ancestral;

namespace {

const model::CounterexampleParams kDefault{0.5, 1.0, 0.075};

Exec exec_for(const benchmark::State& state) {
    return state.range(0) == 0 ? Exec::serial_reference() : Exec::with_workers(static_cast<int>(state.range(0)));
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "openmp x" + std::to_string(state.range(0)));
}

void BM_mc_conditional(benchmark::State& state) {
    const auto exec = exec_for(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(counterexample::mc_conditional(kDefault, 50, 200000, 1, exec));
    state.SetItemsProcessed(state.iterations() * 200000);
    label(state);
}

void BM_mismatch_rates(benchmark::State& state) {
    const auto exec = exec_for(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(coupling::mismatch_rates(kDefault, {50, 100}, 20000, 1, exec));
    state.SetItemsProcessed(state.iterations() * 40000);
    label(state);
}

void BM_limit_diagnostics(benchmark::State& state) {
    const auto exec = exec_for(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(counterexample::limit_diagnostics(kDefault, 200, 20000, 1, exec));
    state.SetItemsProcessed(state.iterations() * 20000);
    label(state);
}

// Argument 0 is the serial reference loop, k > 0 an OpenMP region with k threads.
void worker_args(benchmark::internal::Benchmark* b) {
    b->Arg(0);
    for (int w = 1; w <= available_workers(); w *= 2) b->Arg(w);
    if (available_workers() < 4) b->Arg(4);
    b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_mc_conditional)->Apply(worker_args);
BENCHMARK(BM_mismatch_rates)->Apply(worker_args);
BENCHMARK(BM_limit_diagnostics)->Apply(worker_args);

BENCHMARK_MAIN();
