#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "wecure/graph.hpp"
#include "wecure/solver.hpp"

namespace wecure {

inline constexpr int kUnlabeled = -1;

/// A point cloud with class ids on a subset S. labels[i] == kUnlabeled marks
/// vertices outside S; class ids are nonnegative integers.
struct LabeledDataset {
    PointCloud cloud;
    std::vector<int> labels;

    /// Throws InvalidArgument on length mismatch, negative ids other than
    /// kUnlabeled, or an empty labeled set.
    void validate() const;
    /// Distinct class ids present in S, ascending.
    std::vector<int> classes() const;
    std::vector<Index> labeled_vertices() const;
};

struct SslParams {
    GraphConfig graph{20, 50};
    RecoveryParams recovery;
};

/// One-vs-rest interpolation over a fixed graph. The system matrix depends only
/// on S, so it is assembled once and every class solve reuses it.
class IndicatorSolver {
public:
    IndicatorSolver(const SparseWeightGraph& graph, std::vector<int> labels, const RecoveryParams& params);

    const std::vector<int>& classes() const noexcept { return classes_; }
    const AssembledSystem& system() const noexcept { return system_; }

    /// phi over P: 1 on S_class, 0 on the rest of S, recovered on U.
    Eigen::VectorXd indicator(int class_id) const;
    /// Column c holds the indicator of classes()[c].
    Eigen::MatrixXd all_indicators() const;

private:
    std::vector<int> labels_;
    std::vector<int> classes_;
    RecoveryParams params_;
    AssembledSystem system_;
};

Eigen::VectorXd interpolate_indicator(const LabeledDataset& ds, int class_id, const SslParams& params);

struct Classification {
    std::vector<int> predicted;
    std::vector<int> classes;
    Eigen::MatrixXd indicators;  // n x classes.size()
};

/// Labeled points keep their labels; the rest take the argmax indicator, ties
/// going to the smallest class id.
Classification classify(const SparseWeightGraph& graph, const std::vector<int>& labels, const RecoveryParams& params);
Classification classify(const LabeledDataset& ds, const SslParams& params);

/// Fraction of positions outside `exclude` where predicted == truth. Returns 1
/// when every position is excluded.
double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth, const std::vector<Index>& exclude);

/// Picks `count` vertices uniformly without replacement among those with a
/// known label in `truth`, redrawing (up to `max_attempts` times, same seeded
/// stream) until every class is represented. Returns sorted vertex ids.
std::vector<Index> sample_labeled_set(const std::vector<int>& truth, Index count, std::uint64_t seed,
                                      int max_attempts = 100);

}  // namespace wecure
