#include <benchmark/benchmark.h>

#include "symbridge/kernels.hpp"

using namespace symbridge;

static void BM_build_transfer(benchmark::State& state) {
    Grid g = Grid::make(1, {0.0}, {1.0}, {static_cast<int>(state.range(0))});
    GridFunction f = GridFunction::constant(g, 0.0);
    for (auto _ : state) {
        TransferOperator T = build_transfer(g, f, 0.02);
        benchmark::DoNotOptimize(T.kernel.data());
    }
}
BENCHMARK(BM_build_transfer)->Arg(100)->Arg(200)->Arg(400);

static void BM_fk_bridge_matrix(benchmark::State& state) {
    Grid g = Grid::make(1, {0.0}, {1.0}, {200});
    GridFunction f = GridFunction::constant(g, 0.0);
    for (auto _ : state) {
        ScaledMatrix m = fk_bridge_matrix(g, f, 1.0, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(m.mat.data());
    }
}
BENCHMARK(BM_fk_bridge_matrix)->Arg(16)->Arg(64)->Arg(256);

static void BM_principal_eigen(benchmark::State& state) {
    Grid g = Grid::make(1, {0.0}, {1.0}, {static_cast<int>(state.range(0))});
    GridFunction f = GridFunction::constant(g, 0.0);
    for (int i = 0; i < g.points(); ++i) {
        double x = g.coord(i)[0];
        f[i] = -25.0 * (x - 0.4) * (x - 0.4);
    }
    for (auto _ : state) {
        EigenPair ep = principal_eigen(g, f);
        benchmark::DoNotOptimize(ep.lambda);
    }
}
BENCHMARK(BM_principal_eigen)->Arg(100)->Arg(400);

BENCHMARK_MAIN();
