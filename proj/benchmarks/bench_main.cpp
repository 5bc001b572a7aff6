// bench_main.cpp: micro benchmarks for the hot paths

#include <benchmark/benchmark.h>

#include "ncthermo/dynamics.hpp"
#include "ncthermo/kernels.hpp"
#include "ncthermo/metrology.hpp"

using namespace ncthermo;

namespace {

void BM_EvaluateKernels(benchmark::State& state) {
    KernelParams p;
    const double t = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_kernels(p, t));
}
BENCHMARK(BM_EvaluateKernels)->Arg(1)->Arg(10)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_Precompute(benchmark::State& state) {
    KernelParams p;
    const double t_end = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(precompute(p, t_end, 1e-2));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid_steps(t_end, 1e-2) * 2 + 1));
}
BENCHMARK(BM_Precompute)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_TemperatureFamily(benchmark::State& state) {
    ProbeConfig c;
    c.t_end = 5.0;
    for (auto _ : state) benchmark::DoNotOptimize(stencil_kernel_family(c, {}));
}
BENCHMARK(BM_TemperatureFamily)->Unit(benchmark::kMillisecond);

void BM_Integrate(benchmark::State& state) {
    ProbeConfig c;
    c.t_end = 50.0;
    const auto ks = precompute(c.kernel_params(), c.t_end, c.dt);
    for (auto _ : state) benchmark::DoNotOptimize(integrate(c, ks));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(ks.size() - 1));
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMicrosecond);

void BM_Qfi(benchmark::State& state) {
    const BlochState d{0.3, -0.5, 0.4}, dd{0.7, 0.2, -0.9};
    for (auto _ : state) {
        benchmark::DoNotOptimize(qfi(d, dd));
        benchmark::DoNotOptimize(cfi(Axis::X, d, dd));
    }
}
BENCHMARK(BM_Qfi);

} // namespace

BENCHMARK_MAIN();
