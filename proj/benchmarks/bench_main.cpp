#include <benchmark/benchmark.h>

#include <cstdint>

#include "lsalloc/analysis.hpp"
#include "lsalloc/graph.hpp"
#include "lsalloc/process.hpp"
#include "lsalloc/rng.hpp"

using namespace lsalloc;

namespace {

void BM_BuildRandomRegular(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(build_random_regular(n, 4, seed++));
}
BENCHMARK(BM_BuildRandomRegular)->Arg(1 << 10)->Arg(1 << 13);

void BM_BuildGrid(benchmark::State& state) {
    const auto side = static_cast<std::uint32_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(build_grid(side, 2));
}
BENCHMARK(BM_BuildGrid)->Arg(64)->Arg(256);

void BM_LocalSearch(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const Graph g = build_random_regular(n, 4, 7);
    const TieRule tie = TieRule::uniform_random();
    std::uint64_t seed = 0;
    for (auto _ : state) {
        RandomSource rs(seed++);
        benchmark::DoNotOptimize(run_local_search(g, n, tie, rs));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n);
}
BENCHMARK(BM_LocalSearch)->Arg(1 << 10)->Arg(1 << 14);

void BM_OneChoice(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const Graph g = build_cycle(n);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        RandomSource rs(seed++);
        benchmark::DoNotOptimize(run_one_choice(g, n, rs));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n);
}
BENCHMARK(BM_OneChoice)->Arg(1 << 14);

void BM_BallOfRadius(benchmark::State& state) {
    const Graph g = build_grid(64, 2);
    const auto r = static_cast<std::uint32_t>(state.range(0));
    Vertex v = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ball_of_radius(g, v, r));
        v = (v + 101) % g.num_vertices();
    }
}
BENCHMARK(BM_BallOfRadius)->Arg(2)->Arg(8)->Arg(16);

void BM_ExponentialPotential(benchmark::State& state) {
    const auto n = static_cast<std::uint32_t>(state.range(0));
    const Graph g = build_random_regular(n, 4, 7);
    RandomSource rs(1);
    const RunResult run = run_local_search(g, n, TieRule::uniform_random(), rs);
    for (auto _ : state) benchmark::DoNotOptimize(exponential_potential(g, run.loads));
}
BENCHMARK(BM_ExponentialPotential)->Arg(1 << 10)->Arg(1 << 14);

} // namespace

BENCHMARK_MAIN();
