#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wecure/errors.hpp"

namespace wecure {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;

/// n points in R^d, stored one point per row.
class PointCloud {
public:
    PointCloud() = default;
    /// Throws InvalidArgument when empty or when any coordinate is non-finite.
    explicit PointCloud(RowMatrix points);

    Index size() const noexcept { return points_.rows(); }
    Index dim() const noexcept { return points_.cols(); }
    const RowMatrix& points() const noexcept { return points_; }
    auto point(Index i) const { return points_.row(i); }

private:
    RowMatrix points_;
};

struct GraphConfig {
    Index k_sigma = 20;  // neighbour rank that sets the local bandwidth
    Index k_trunc = 50;  // neighbours kept per row before symmetrization

    /// Throws InvalidArgument unless 1 <= k_sigma <= k_trunc < n.
    void validate(Index n) const;
};

struct Neighbor {
    Index id;
    double distance;
};

/// k nearest neighbours of every vertex, row i holding vertex i's list sorted by
/// (distance, id). The vertex itself is never listed.
struct NeighborTable {
    Index k = 0;
    Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> ids;
    RowMatrix distances;

    Index size() const noexcept { return ids.rows(); }
};

/// Exact k nearest neighbours of one point by linear scan, ties broken by id.
std::vector<Neighbor> knn_search(const PointCloud& cloud, Index query, Index k);

/// Exact k nearest neighbours of all points. Candidates are screened with a
/// blocked inner-product pass and then re-ranked on exact distances inside a
/// rounding-error margin, so the result matches knn_search bit for bit.
NeighborTable knn_table(const PointCloud& cloud, Index k);

/// sigma_i = distance to the k_sigma-th neighbour. Throws DegenerateBandwidth
/// if that distance is zero.
Eigen::VectorXd local_scale(const PointCloud& cloud, const GraphConfig& cfg);
Eigen::VectorXd local_scale(const NeighborTable& table, Index k_sigma);

/// Symmetric, loop-free weight matrix with cached degrees.
class SparseWeightGraph {
public:
    SparseWeightGraph() = default;

    /// Takes ownership of a weight matrix. Throws InvalidArgument unless the
    /// matrix is square, exactly symmetric, has an empty diagonal and all
    /// stored weights lie in (0, 1].
    explicit SparseWeightGraph(SparseMatrix weights);

    /// Builds from undirected edges (i, j, w); each unordered pair at most once.
    static SparseWeightGraph from_edges(Index n, std::span<const Eigen::Triplet<double, Index>> edges);

    Index size() const noexcept { return weights_.rows(); }
    const SparseMatrix& weights() const noexcept { return weights_; }
    const Eigen::VectorXd& degree() const noexcept { return degree_; }
    double weight(Index i, Index j) const { return weights_.coeff(i, j); }

private:
    SparseMatrix weights_;
    Eigen::VectorXd degree_;
};

/// Gaussian kNN weights exp(-|x_i - x_j|^2 / sigma_i^2), truncated to the
/// k_trunc nearest neighbours of i and symmetrized as (W + W^T) / 2.
SparseWeightGraph build_weight_graph(const PointCloud& cloud, const GraphConfig& cfg);
SparseWeightGraph build_weight_graph(const NeighborTable& table, const GraphConfig& cfg);

/// (GL u)_i = sum_j w_ij (u_i - u_j).
Eigen::VectorXd graph_laplacian_apply(const SparseWeightGraph& g, const Eigen::VectorXd& u);

/// L = diag(degree) - W.
SparseMatrix assemble_laplacian_matrix(const SparseWeightGraph& g);

/// Vertices grouped by connected component; component[i] is the label of vertex i.
std::vector<Index> connected_components(const SparseWeightGraph& g);

}  // namespace wecure
