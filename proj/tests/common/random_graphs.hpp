#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "wecure/graph.hpp"
#include "wecure/solver.hpp"

namespace wecure::testing {

// Random connected graph: a random spanning tree plus `extra` random chords,
// weights uniform in (0.05, 1].
inline SparseWeightGraph random_connected_graph(Index n, Index extra, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> wdist(0.05, 1.0);
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::set<std::pair<Index, Index>> seen;
    std::vector<Eigen::Triplet<double, Index>> edges;
    auto add = [&](Index a, Index b) {
        if (a == b) return;
        auto key = std::minmax(a, b);
        if (!seen.insert({key.first, key.second}).second) return;
        edges.emplace_back(a, b, wdist(rng));
    };
    for (Index i = 1; i < n; ++i) {
        std::uniform_int_distribution<Index> parent(0, i - 1);
        add(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(parent(rng))]);
    }
    std::uniform_int_distribution<Index> any(0, n - 1);
    for (Index e = 0; e < extra; ++e) add(any(rng), any(rng));
    return SparseWeightGraph::from_edges(n, edges);
}

// `m` distinct labeled vertices with values uniform in [-1, 1].
inline Observations random_observations(Index n, Index m, std::mt19937_64& rng) {
    std::vector<Index> ids(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(static_cast<std::size_t>(m));
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Observations obs;
    obs.vertices = ids;
    for (Index k = 0; k < m; ++k) obs.values.push_back(val(rng));
    return obs;
}

inline PointCloud random_cloud(Index n, Index d, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    RowMatrix x(n, d);
    for (Index i = 0; i < n; ++i)
        for (Index c = 0; c < d; ++c) x(i, c) = nd(rng);
    return PointCloud(std::move(x));
}

}  // namespace wecure::testing
