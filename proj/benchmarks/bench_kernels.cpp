#include <benchmark/benchmark.h>

#include "viab/epi_hj.hpp"
#include "viab/fields.hpp"
#include "viab/kernels.hpp"

namespace {

void BM_ViabFieldGrowth(benchmark::State& state)
{
    const auto f = viab::fields::scalar_linear(1.0);
    const auto k = viab::SetOracle::box({-1.0}, {1.0});
    const viab::GridSpec grid({-1.0}, {1.0}, {401});
    const viab::Exec exec{static_cast<unsigned>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(viab::viab_field(f, k, grid, 20.0, 0.01, exec));
}
BENCHMARK(BM_ViabFieldGrowth)->Arg(1)->Arg(4)->UseRealTime();

void BM_CaptFieldRotation(benchmark::State& state)
{
    const auto f = viab::fields::rotation();
    const auto c = viab::SetOracle::ball({1.0, 0.0}, 0.1);
    const auto n = static_cast<std::size_t>(state.range(0));
    const viab::GridSpec grid({-1.0, -1.0}, {1.0, 1.0}, {n, n});
    for (auto _ : state) benchmark::DoNotOptimize(viab::capt_field(f, c, grid, 7.0, 0.01, viab::Exec{4}));
}
BENCHMARK(BM_CaptFieldRotation)->Arg(21)->Arg(41)->UseRealTime();

void BM_EpigraphSup(benchmark::State& state)
{
    viab::LagrangianProblem p;
    p.f = viab::fields::scalar_linear(-1.0);
    p.u = [](std::span<const double> x) { return viab::norm(x); };
    p.value_cap = 2.0;
    const auto n = static_cast<std::size_t>(state.range(0));
    const viab::GridSpec grid({-1.0, 0.0}, {1.0, 2.0}, {n, n});
    for (auto _ : state)
        benchmark::DoNotOptimize(viab::epigraph_value_field(p, grid, viab::ValueMode::sup, 3.0, 0.01, viab::Exec{4}));
}
BENCHMARK(BM_EpigraphSup)->Arg(51)->Arg(101)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
