#include <benchmark/benchmark.h>

#include "symbridge/bosegas.hpp"
#include "symbridge/ensemble.hpp"

using namespace symbridge;

static void BM_sample_sym(benchmark::State& state) {
    InitialMeasure m = InitialMeasure::uniform_box({0.0}, {1.0});
    const int n = static_cast<int>(state.range(0));
    std::uint64_t e = 0;
    for (auto _ : state) {
        CounterRng rng(CounterRng::derive_key(1, 1, e++));
        EnsembleSample s = sample_sym(m, n, 1.0, 16, nullptr, rng);
        benchmark::DoNotOptimize(s.log_weight);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_sample_sym)->Arg(64)->Arg(1024)->Arg(10000);

static void BM_bridge(benchmark::State& state) {
    CounterRng rng(7);
    Point x{0.2, 0.0, 0.0}, y{0.8, 0.0, 0.0};
    for (auto _ : state) {
        Path p = sample_bridge(x, y, 1, 1.0, static_cast<int>(state.range(0)), rng);
        benchmark::DoNotOptimize(p.pts.data());
    }
}
BENCHMARK(BM_bridge)->Arg(16)->Arg(64)->Arg(256);

static void BM_partition_recursion(benchmark::State& state) {
    Spectrum s = analytic_box_spectrum({1.0}, 6);
    for (auto _ : state) {
        PartitionTable t = partition_recursion(s, 1.0, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(t.logz.data());
    }
}
BENCHMARK(BM_partition_recursion)->Arg(200)->Arg(1000);

BENCHMARK_MAIN();
