#include <orderbench/harness.hpp>

#include <benchmark/benchmark.h>

namespace {

using namespace orderbench;

void BM_EvaluateRandom(benchmark::State& state)
{
    const auto corpus = generate_synthetic(2000, 5, 1);
    RunConfig config;
    config.jobs = static_cast<std::size_t>(state.range(0));
    const RandomOrderer random(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(corpus, random, config));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}
BENCHMARK(BM_EvaluateRandom)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_EvaluateBtsort(benchmark::State& state)
{
    const auto train = generate_synthetic(300, 5, 2);
    const auto corpus = generate_synthetic(1000, 5, 3);
    const BtsortOrderer btsort(std::make_shared<PairwiseModel>(train_pairwise(train, {.epochs = 2})));
    RunConfig config;
    config.jobs = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(corpus, btsort, config));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(corpus.size()));
}
BENCHMARK(BM_EvaluateBtsort)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TrainPairwise(benchmark::State& state)
{
    const auto train = generate_synthetic(500, 5, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(train_pairwise(train, {.epochs = 1}));
    }
}
BENCHMARK(BM_TrainPairwise)->Unit(benchmark::kMillisecond);

} // namespace
