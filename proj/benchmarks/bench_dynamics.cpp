#include <benchmark/benchmark.h>

#include <cmath>

#include "viab/dynamics.hpp"
#include "viab/fields.hpp"
#include "viab/sets.hpp"
#include "viab/viable_euler.hpp"

namespace {

void BM_Rk4Rotation(benchmark::State& state)
{
    const auto f = viab::fields::rotation();
    const double h = 1.0 / static_cast<double>(state.range(0));
    const viab::State x0{1.0, 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(viab::advance(f, x0, 0.0, 10.0, h));
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(10.0 / h));
}
BENCHMARK(BM_Rk4Rotation)->Arg(100)->Arg(1000);

void BM_ViableEulerCircle(benchmark::State& state)
{
    const auto f = viab::fields::rotation();
    const auto k = viab::SetOracle::sphere({0.0, 0.0}, 1.0);
    const viab::State x0{1.0, 0.0};
    const double h = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(viab::viable_trajectory(f, k, x0, 1.0, h));
}
BENCHMARK(BM_ViableEulerCircle)->Arg(100)->Arg(400);

void BM_PointCloudProjection(benchmark::State& state)
{
    std::vector<viab::State> pts;
    const auto n = static_cast<std::size_t>(state.range(0));
    for (std::size_t i = 0; i < n; ++i) {
        const double a = 6.283185307179586 * static_cast<double>(i) / static_cast<double>(n);
        pts.push_back({std::cos(a), std::sin(a)});
    }
    const auto cloud = viab::SetOracle::point_cloud(viab::PointCloud(pts, 0.0));
    const viab::State y{0.3, 0.4};
    for (auto _ : state) benchmark::DoNotOptimize(cloud.project(y));
}
BENCHMARK(BM_PointCloudProjection)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
