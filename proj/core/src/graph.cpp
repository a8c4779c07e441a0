#include <cmath>
#include <queue>
#include <string>

#include "wecure/graph.hpp"

namespace wecure {

PointCloud::PointCloud(RowMatrix points) : points_(std::move(points)) {
    if (points_.rows() < 1) throw InvalidArgument("PointCloud: at least one point is required");
    if (points_.cols() < 1) throw InvalidArgument("PointCloud: points need at least one coordinate");
    if (!points_.allFinite()) throw InvalidArgument("PointCloud: non-finite coordinate");
}

void GraphConfig::validate(Index n) const {
    if (k_sigma < 1 || k_sigma > k_trunc || k_trunc >= n) {
        throw InvalidArgument("GraphConfig: need 1 <= k_sigma <= k_trunc < n (k_sigma=" +
                              std::to_string(k_sigma) + ", k_trunc=" + std::to_string(k_trunc) +
                              ", n=" + std::to_string(n) + ")");
    }
}

Eigen::VectorXd local_scale(const NeighborTable& table, Index k_sigma) {
    if (k_sigma < 1 || k_sigma > table.k) {
        throw InvalidArgument("local_scale: k_sigma outside the neighbour table");
    }
    Eigen::VectorXd sigma(table.size());
    for (Index i = 0; i < table.size(); ++i) {
        sigma[i] = table.distances(i, k_sigma - 1);
        if (!(sigma[i] > 0.0)) {
            throw DegenerateBandwidth(i, "local_scale: vertex " + std::to_string(i) +
                                             " has a duplicate point as its k_sigma-th neighbour");
        }
    }
    return sigma;
}

Eigen::VectorXd local_scale(const PointCloud& cloud, const GraphConfig& cfg) {
    if (cfg.k_sigma < 1 || cfg.k_sigma >= cloud.size()) {
        throw InvalidArgument("local_scale: need 1 <= k_sigma < n");
    }
    return local_scale(knn_table(cloud, cfg.k_sigma), cfg.k_sigma);
}

SparseWeightGraph::SparseWeightGraph(SparseMatrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) throw InvalidArgument("SparseWeightGraph: matrix not square");
    weights_.makeCompressed();
    const SparseMatrix transposed = weights_.transpose();
    for (Index i = 0; i < weights_.outerSize(); ++i) {
        SparseMatrix::InnerIterator a(weights_, i);
        SparseMatrix::InnerIterator b(transposed, i);
        for (; a && b; ++a, ++b) {
            if (a.col() != b.col() || a.value() != b.value()) {
                throw InvalidArgument("SparseWeightGraph: weights not exactly symmetric at row " + std::to_string(i));
            }
            if (a.col() == i) throw InvalidArgument("SparseWeightGraph: self loop at vertex " + std::to_string(i));
            if (!(a.value() > 0.0 && a.value() <= 1.0)) {
                throw InvalidArgument("SparseWeightGraph: weight outside (0, 1] at row " + std::to_string(i));
            }
        }
        if (a || b) throw InvalidArgument("SparseWeightGraph: sparsity pattern not symmetric at row " + std::to_string(i));
    }
    degree_.resize(weights_.rows());
    for (Index i = 0; i < weights_.outerSize(); ++i) {
        double sum = 0.0;
        for (SparseMatrix::InnerIterator it(weights_, i); it; ++it) sum += it.value();
        degree_[i] = sum;
    }
}

SparseWeightGraph SparseWeightGraph::from_edges(Index n, std::span<const Eigen::Triplet<double, Index>> edges) {
    std::vector<Eigen::Triplet<double, Index>> both;
    both.reserve(edges.size() * 2);
    for (const auto& e : edges) {
        if (e.row() < 0 || e.row() >= n || e.col() < 0 || e.col() >= n) {
            throw InvalidArgument("SparseWeightGraph::from_edges: vertex id out of range");
        }
        both.emplace_back(e.row(), e.col(), e.value());
        both.emplace_back(e.col(), e.row(), e.value());
    }
    SparseMatrix w(n, n);
    w.setFromTriplets(both.begin(), both.end(), [](double, double) -> double {
        throw InvalidArgument("SparseWeightGraph::from_edges: duplicate edge");
    });
    return SparseWeightGraph(std::move(w));
}

SparseWeightGraph build_weight_graph(const NeighborTable& table, const GraphConfig& cfg) {
    const Index n = table.size();
    cfg.validate(n);
    if (table.k < cfg.k_trunc) throw InvalidArgument("build_weight_graph: neighbour table shorter than k_trunc");

    const Eigen::VectorXd sigma = local_scale(table, cfg.k_sigma);

    std::vector<Eigen::Triplet<double, Index>> raw;
    raw.reserve(static_cast<std::size_t>(n * cfg.k_trunc));
    for (Index i = 0; i < n; ++i) {
        const double inv_s2 = 1.0 / (sigma[i] * sigma[i]);
        for (Index c = 0; c < cfg.k_trunc; ++c) {
            const double d = table.distances(i, c);
            raw.emplace_back(i, table.ids(i, c), std::exp(-d * d * inv_s2));
        }
    }
    SparseMatrix directed(n, n);
    directed.setFromTriplets(raw.begin(), raw.end());

    // a + b == b + a in IEEE arithmetic, so the average is bitwise symmetric.
    SparseMatrix w = 0.5 * (directed + SparseMatrix(directed.transpose()));
    w.prune([](Index, Index, double v) { return v > 0.0; });  // underflowed weights
    return SparseWeightGraph(std::move(w));
}

SparseWeightGraph build_weight_graph(const PointCloud& cloud, const GraphConfig& cfg) {
    cfg.validate(cloud.size());
    return build_weight_graph(knn_table(cloud, cfg.k_trunc), cfg);
}

Eigen::VectorXd graph_laplacian_apply(const SparseWeightGraph& g, const Eigen::VectorXd& u) {
    if (u.size() != g.size()) {
        throw InvalidArgument("graph_laplacian_apply: vector length " + std::to_string(u.size()) +
                              " does not match graph size " + std::to_string(g.size()));
    }
    Eigen::VectorXd out(g.size());
    const SparseMatrix& w = g.weights();
    for (Index i = 0; i < w.outerSize(); ++i) {
        double acc = 0.0;
        for (SparseMatrix::InnerIterator it(w, i); it; ++it) acc += it.value() * (u[i] - u[it.col()]);
        out[i] = acc;
    }
    return out;
}

SparseMatrix assemble_laplacian_matrix(const SparseWeightGraph& g) {
    const Index n = g.size();
    std::vector<Eigen::Triplet<double, Index>> entries;
    entries.reserve(static_cast<std::size_t>(g.weights().nonZeros() + n));
    for (Index i = 0; i < n; ++i) {
        entries.emplace_back(i, i, g.degree()[i]);
        for (SparseMatrix::InnerIterator it(g.weights(), i); it; ++it) {
            entries.emplace_back(i, it.col(), -it.value());
        }
    }
    SparseMatrix lap(n, n);
    lap.setFromTriplets(entries.begin(), entries.end());
    return lap;
}

std::vector<Index> connected_components(const SparseWeightGraph& g) {
    const Index n = g.size();
    std::vector<Index> comp(static_cast<std::size_t>(n), -1);
    Index next = 0;
    std::queue<Index> frontier;
    for (Index s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        comp[static_cast<std::size_t>(s)] = next;
        frontier.push(s);
        while (!frontier.empty()) {
            const Index v = frontier.front();
            frontier.pop();
            for (SparseMatrix::InnerIterator it(g.weights(), v); it; ++it) {
                auto& c = comp[static_cast<std::size_t>(it.col())];
                if (c < 0) {
                    c = next;
                    frontier.push(it.col());
                }
            }
        }
        ++next;
    }
    return comp;
}

}  // namespace wecure
