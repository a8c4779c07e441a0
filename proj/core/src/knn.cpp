#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wecure/graph.hpp"

namespace wecure {

namespace {

// Sum of squared coordinate differences, accumulated in index order. Both the
// single-query scan and the table builder rank on this value so that they agree
// exactly.
double exact_distance(const PointCloud& cloud, Index a, Index b) {
    const double* pa = cloud.points().row(a).data();
    const double* pb = cloud.points().row(b).data();
    double acc = 0.0;
    for (Index c = 0; c < cloud.dim(); ++c) {
        const double diff = pa[c] - pb[c];
        acc += diff * diff;
    }
    return std::sqrt(acc);
}

constexpr Index kChunk = 64;

bool closer(const Neighbor& a, const Neighbor& b) {
    return a.distance < b.distance || (a.distance == b.distance && a.id < b.id);
}

void check_k(const PointCloud& cloud, Index k) {
    if (k < 1 || k >= cloud.size()) {
        throw InvalidArgument("knn: k must satisfy 1 <= k < n (k=" + std::to_string(k) +
                              ", n=" + std::to_string(cloud.size()) + ")");
    }
}

}  // namespace

std::vector<Neighbor> knn_search(const PointCloud& cloud, Index query, Index k) {
    check_k(cloud, k);
    if (query < 0 || query >= cloud.size()) {
        throw InvalidArgument("knn_search: query index out of range");
    }
    std::vector<Neighbor> all;
    all.reserve(static_cast<std::size_t>(cloud.size() - 1));
    for (Index j = 0; j < cloud.size(); ++j) {
        if (j != query) all.push_back({j, exact_distance(cloud, query, j)});
    }
    std::partial_sort(all.begin(), all.begin() + k, all.end(), closer);
    all.resize(static_cast<std::size_t>(k));
    return all;
}

NeighborTable knn_table(const PointCloud& cloud, Index k) {
    check_k(cloud, k);
    const Index n = cloud.size();
    const Index dim = cloud.dim();

    NeighborTable table;
    table.k = k;
    table.ids.resize(n, k);
    table.distances.resize(n, k);

    // Screening runs in single precision. With G the float inner product,
    // |sq_i + sq_j - 2 G_ij - |x_i - x_j|^2| <= (dim + 2) eps_f (sq_i + sq_j),
    // so a margin of twice that (times a safety factor) above the k-th screened
    // value keeps every true neighbour in the candidate set.
    using FloatMatrix = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    const FloatMatrix xf = cloud.points().cast<float>();
    const Eigen::VectorXd sq = cloud.points().rowwise().squaredNorm();
    const double max_sq = sq.maxCoeff();
    const double rel_margin = 8.0 * static_cast<double>(dim + 2) * std::numeric_limits<float>::epsilon();

    // Keep each block of inner products around 16 MB.
    const Index block = std::clamp<Index>((Index{1} << 22) / std::max<Index>(n, 1), 1, 512);
    FloatMatrix gram(block, n);
    std::vector<double> approx(static_cast<std::size_t>(n));
    std::vector<double> buffer;
    buffer.reserve(static_cast<std::size_t>(std::max<Index>(4 * k, n / 8 + 1)));
    std::vector<Index> hits(static_cast<std::size_t>(n) + 1);
    std::vector<Neighbor> candidates;

    for (Index start = 0; start < n; start += block) {
        const Index rows = std::min(block, n - start);
        gram.topRows(rows).noalias() = xf.middleRows(start, rows) * xf.transpose();

        for (Index r = 0; r < rows; ++r) {
            const Index i = start + r;
            const float* g = gram.row(r).data();
            // Screened squared distance minus the constant sq_i.
            Eigen::Map<Eigen::VectorXd>(approx.data(), n) =
                sq - 2.0 * Eigen::Map<const Eigen::VectorXf>(g, n).cast<double>();
            approx[static_cast<std::size_t>(i)] = std::numeric_limits<double>::infinity();

            // k-th smallest screened value. The k-th smallest of a strided
            // subsample bounds it from above and seeds the running threshold;
            // values below the threshold are buffered and the buffer is cut
            // back to k whenever it reaches 4k.
            buffer.clear();
            double running = std::numeric_limits<double>::infinity();
            if (n > 16 * k) {
                for (Index j = 0; j < n; j += 8) buffer.push_back(approx[static_cast<std::size_t>(j)]);
                std::nth_element(buffer.begin(), buffer.begin() + (k - 1), buffer.end());
                running = buffer[static_cast<std::size_t>(k - 1)];
                buffer.clear();
            }
            for (Index b = 0; b < n; b += kChunk) {
                const Index len = std::min(kChunk, n - b);
                const double* chunk = approx.data() + b;
                if (Eigen::Map<const Eigen::VectorXd>(chunk, len).minCoeff() > running) continue;
                for (Index j = 0; j < len; ++j) {
                    if (chunk[j] > running) continue;
                    buffer.push_back(chunk[j]);
                    if (static_cast<Index>(buffer.size()) >= 4 * k) {
                        std::nth_element(buffer.begin(), buffer.begin() + (k - 1), buffer.end());
                        buffer.resize(static_cast<std::size_t>(k));
                        running = buffer.back();
                    }
                }
            }
            std::nth_element(buffer.begin(), buffer.begin() + (k - 1), buffer.end());
            const double threshold = buffer[static_cast<std::size_t>(k - 1)] + rel_margin * (sq[i] + max_sq);

            Index found = 0;
            for (Index b = 0; b < n; b += kChunk) {
                const Index len = std::min(kChunk, n - b);
                const double* chunk = approx.data() + b;
                if (Eigen::Map<const Eigen::VectorXd>(chunk, len).minCoeff() > threshold) continue;
                for (Index j = 0; j < len; ++j) {
                    hits[static_cast<std::size_t>(found)] = b + j;
                    found += chunk[j] <= threshold ? 1 : 0;
                }
            }
            candidates.clear();
            for (Index c = 0; c < found; ++c) {
                const Index j = hits[static_cast<std::size_t>(c)];
                candidates.push_back({j, exact_distance(cloud, i, j)});
            }
            std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(), closer);
            for (Index c = 0; c < k; ++c) {
                table.ids(i, c) = candidates[static_cast<std::size_t>(c)].id;
                table.distances(i, c) = candidates[static_cast<std::size_t>(c)].distance;
            }
        }
    }
    return table;
}

}  // namespace wecure
