#include <orderbench/metrics.hpp>
#include <orderbench/pairwise.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace orderbench;

void BM_KendallTau(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = sample_shuffle(n, 1);
    const auto b = sample_shuffle(n, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kendall_tau(a, b));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_MinSwaps(benchmark::State& state)
{
    const auto p = sample_shuffle(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(min_swaps(p));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MinSwaps)->RangeMultiplier(4)->Range(4, 4096)->Complexity();

void BM_BtsortDecode(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    Rng rng(4);
    PrecedenceMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            m(i, j) = i == j ? 0.0 : rng.unit() * 2.0 - 1.0;
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(btsort_decode(m));
    }
}
BENCHMARK(BM_BtsortDecode)->Arg(5)->Arg(20)->Arg(100);

} // namespace
