#include <benchmark/benchmark.h>

#include "gapscope/cocycle.hpp"
#include "gapscope/spectrum.hpp"

using namespace gapscope;

static void BM_CocycleProduct(benchmark::State& state) {
    auto alpha = golden_frequency();
    SchrodingerCocycle c{0.5, 0.3, 0.0, alpha};
    auto map = transfer_map(c);
    long n = state.range(0);
    for (auto _ : state) {
        auto r = cocycle_product(map, alpha, 0.1, n);
        benchmark::DoNotOptimize(r.log_scale);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CocycleProduct)->Arg(1000)->Arg(10000);

static void BM_Lyapunov(benchmark::State& state) {
    auto alpha = golden_frequency();
    SchrodingerCocycle c{2.0, 0.0, 0.0, alpha};
    for (auto _ : state) {
        double l = lyapunov_exponent(c, state.range(0), 8, 0);
        benchmark::DoNotOptimize(l);
    }
}
BENCHMARK(BM_Lyapunov)->Arg(10000)->Arg(100000);

static void BM_SturmIds(benchmark::State& state) {
    auto alpha = golden_frequency();
    for (auto _ : state) {
        double v = ids(0.5, alpha, 0.0, state.range(0), 16, 0);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_SturmIds)->Arg(1000)->Arg(4000);

static void BM_UhTest(benchmark::State& state) {
    auto alpha = golden_frequency();
    SchrodingerCocycle c{0.5, 2.9, 0.0, alpha};
    for (auto _ : state) {
        auto v = is_uniformly_hyperbolic(c);
        benchmark::DoNotOptimize(v.margin);
    }
}
BENCHMARK(BM_UhTest);

BENCHMARK_MAIN();
