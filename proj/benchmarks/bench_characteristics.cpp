#include <benchmark/benchmark.h>

#include "viab/characteristics.hpp"
#include "viab/demo4d.hpp"

namespace {

viab::Demo4d demo()
{
    viab::Demo4d d(
        viab::Demo4dParams{}, [](std::span<const double> x) { return 1.0 + x[0]; },
        [](double s, std::span<const double>) { return 2.0 + s; }, [](double s, std::span<const double>) { return 3.0 - s; });
    d.set_rate(0.4);
    return d;
}

void BM_SolveCharDemo4d(benchmark::State& state)
{
    const auto d = demo();
    const auto prob = d.char_problem();
    const auto queries = viab::demo4d_samples(d, 20, 1);
    const viab::Exec exec{static_cast<unsigned>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(viab::solve_char_batch(prob, queries, 0.01, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(queries.size()));
}
BENCHMARK(BM_SolveCharDemo4d)->Arg(1)->Arg(4)->UseRealTime();

void BM_GraphSampleShock(benchmark::State& state)
{
    viab::CharProblem prob;
    prob.phi.dim = 1;
    prob.f = [](double, std::span<const double>, std::span<const double> y) { return viab::State{y[0]}; };
    prob.g = [](double, std::span<const double>, std::span<const double>) { return viab::State{0.0}; };
    prob.k = viab::SetOracle::whole_space(1);
    prob.data.u0 = [](std::span<const double> x) { return viab::State{-x[0]}; };
    viab::GraphSampleOptions opts;
    opts.seed_grid = viab::GridSpec({-1.0}, {1.0}, {static_cast<std::size_t>(state.range(0))});
    for (auto _ : state) {
        const auto cloud = viab::graph_sample(prob, 1.5, 0.01, opts);
        benchmark::DoNotOptimize(viab::query_graph(cloud, 1.0, viab::State{0.0}, 0.02));
    }
}
BENCHMARK(BM_GraphSampleShock)->Arg(41)->Arg(401);

}  // namespace

BENCHMARK_MAIN();
