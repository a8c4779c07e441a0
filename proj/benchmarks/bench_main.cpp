#include <random>

#include <benchmark/benchmark.h>

#include "wecure/graph.hpp"
#include "wecure/solver.hpp"

using namespace wecure;

namespace {

PointCloud gaussian_cloud(Index n, Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    RowMatrix x(n, d);
    for (Index k = 0; k < x.size(); ++k) x.data()[k] = nd(rng);
    return PointCloud(std::move(x));
}

// Labels every tenth vertex with a smooth function of its first coordinate.
Observations every_tenth(const PointCloud& cloud) {
    Observations obs;
    for (Index i = 0; i < cloud.size(); i += 10) {
        obs.vertices.push_back(i);
        obs.values.push_back(std::tanh(cloud.point(i)(0)));
    }
    return obs;
}

void BM_KnnTable(benchmark::State& state) {
    const PointCloud cloud = gaussian_cloud(state.range(0), state.range(1), 1);
    for (auto _ : state) benchmark::DoNotOptimize(knn_table(cloud, 50));
}
BENCHMARK(BM_KnnTable)->Args({1000, 32})->Args({2000, 32})->Args({4000, 32})->Args({2000, 784})
    ->Unit(benchmark::kMillisecond);

void BM_BuildWeightGraph(benchmark::State& state) {
    const PointCloud cloud = gaussian_cloud(state.range(0), 32, 2);
    const NeighborTable table = knn_table(cloud, 50);
    for (auto _ : state) benchmark::DoNotOptimize(build_weight_graph(table, GraphConfig{20, 50}));
}
BENCHMARK(BM_BuildWeightGraph)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_SolveCg(benchmark::State& state) {
    const PointCloud cloud = gaussian_cloud(state.range(0), 16, 3);
    const auto graph = build_weight_graph(cloud, GraphConfig{10, 30});
    RecoveryParams params;
    params.method = static_cast<Method>(state.range(1));
    const auto sys = assemble_system(graph, every_tenth(cloud), params);
    Index iterations = 0;
    for (auto _ : state) {
        const CgResult r = solve_cg(sys, 1e-6, 10 * sys.size());
        iterations = r.iterations;
        benchmark::DoNotOptimize(r.solution.data());
    }
    state.counters["cg_iters"] = static_cast<double>(iterations);
    state.SetLabel(std::string(to_string(params.method)));
}
BENCHMARK(BM_SolveCg)
    ->Args({2000, static_cast<int>(Method::WNLL)})
    ->Args({2000, static_cast<int>(Method::WeCURE)})
    ->Args({8000, static_cast<int>(Method::WNLL)})
    ->Args({8000, static_cast<int>(Method::WeCURE)})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
