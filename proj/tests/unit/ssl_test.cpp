#include <algorithm>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "random_graphs.hpp"
#include "wecure/ssl.hpp"

using namespace wecure;
using wecure::testing::random_connected_graph;
using T = Eigen::Triplet<double, Index>;

namespace {

// Two 2-D Gaussian blobs far apart, 40 points each.
LabeledDataset two_blobs(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 0.3);
    RowMatrix x(80, 2);
    for (Index i = 0; i < 80; ++i) {
        const double cx = i < 40 ? 0.0 : 10.0;
        x(i, 0) = cx + nd(rng);
        x(i, 1) = nd(rng);
    }
    return {PointCloud(std::move(x)), std::vector<int>(80, kUnlabeled)};
}

RecoveryParams tight(Method m) {
    RecoveryParams p;
    p.method = m;
    p.cg_tol = 1e-12;
    return p;
}

}  // namespace

TEST(LabeledDataset, Validation) {
    auto ds = two_blobs(1);
    EXPECT_THROW(ds.validate(), InvalidArgument);  // nothing labeled
    ds.labels[3] = 2;
    ds.labels[50] = 0;
    EXPECT_NO_THROW(ds.validate());
    EXPECT_EQ(ds.classes(), (std::vector<int>{0, 2}));
    EXPECT_EQ(ds.labeled_vertices(), (std::vector<Index>{3, 50}));
    ds.labels[4] = -7;
    EXPECT_THROW(ds.validate(), InvalidArgument);
    ds.labels.pop_back();
    EXPECT_THROW(ds.validate(), InvalidArgument);
}

TEST(InterpolateIndicator, EverythingLabeled) {
    std::mt19937_64 rng(61);
    const auto graph = random_connected_graph(30, 40, rng);
    std::vector<int> labels(30);
    for (Index i = 0; i < 30; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 3);
    const IndicatorSolver solver(graph, labels, RecoveryParams{});
    for (int c = 0; c < 3; ++c) {
        const Eigen::VectorXd phi = solver.indicator(c);
        for (Index i = 0; i < 30; ++i) EXPECT_EQ(phi(i), labels[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0);
    }
    const auto result = classify(graph, labels, RecoveryParams{});
    EXPECT_EQ(result.predicted, labels);
}

TEST(InterpolateIndicator, TwoComponentsOneSeedEach) {
    // Two disjoint paths, each with one labeled end.
    std::vector<T> edges;
    for (Index i = 0; i < 9; ++i) edges.emplace_back(i, i + 1, 0.7);
    for (Index i = 10; i < 19; ++i) edges.emplace_back(i, i + 1, 0.4);
    const auto graph = SparseWeightGraph::from_edges(20, edges);
    std::vector<int> labels(20, kUnlabeled);
    labels[0] = 4;
    labels[19] = 9;
    for (Method m : {Method::LDMM, Method::WNLL, Method::CURE, Method::WeCURE}) {
        const IndicatorSolver solver(graph, labels, tight(m));
        const Eigen::VectorXd a = solver.indicator(4);
        const Eigen::VectorXd b = solver.indicator(9);
        for (Index i = 0; i < 10; ++i) {
            EXPECT_NEAR(a(i), 1.0, 1e-10);
            EXPECT_NEAR(b(i), 0.0, 1e-10);
        }
        for (Index i = 10; i < 20; ++i) {
            EXPECT_NEAR(a(i), 0.0, 1e-10);
            EXPECT_NEAR(b(i), 1.0, 1e-10);
        }
        // Cross-check one component against the dense oracle.
        const Eigen::VectorXd dense = solver.system().scatter(std::vector<double>{1.0, 0.0},
                                                              solve_dense_oracle(solver.system(),
                                                                                 solver.system().rhs_for(std::vector<double>{1.0, 0.0}))
                                                                  .solution);
        EXPECT_LE((dense - a).cwiseAbs().maxCoeff(), 1e-9);
        const auto result = classify(graph, labels, tight(m));
        for (Index i = 0; i < 20; ++i) EXPECT_EQ(result.predicted[static_cast<std::size_t>(i)], i < 10 ? 4 : 9);
    }
}

TEST(InterpolateIndicator, SingleClassIsConstant) {
    auto ds = two_blobs(2);
    ds.labels[0] = 1;
    ds.labels[70] = 1;
    SslParams p;
    p.graph = {5, 10};
    const Eigen::VectorXd phi = interpolate_indicator(ds, 1, p);
    EXPECT_LE((phi.array() - 1.0).abs().maxCoeff(), 1e-10);
    EXPECT_THROW(interpolate_indicator(ds, 2, p), InvalidArgument);
}

TEST(InterpolateIndicator, IndicatorsSumToOne) {
    std::mt19937_64 rng(62);
    for (int t = 0; t < 5; ++t) {
        const auto graph = random_connected_graph(200, 600, rng);
        std::vector<int> labels(200, kUnlabeled);
        std::uniform_int_distribution<Index> pick(0, 199);
        for (int k = 0; k < 20; ++k) labels[static_cast<std::size_t>(pick(rng))] = k % 4;
        for (Method m : {Method::WNLL, Method::WeCURE, Method::CURE}) {
            RecoveryParams p = tight(m);
            p.cg_tol = 1e-11;
            const IndicatorSolver solver(graph, labels, p);
            const Eigen::MatrixXd phi = solver.all_indicators();
            EXPECT_LE((phi.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-8);
        }
    }
}

TEST(InterpolateIndicator, SharesOneSystemAcrossClasses) {
    std::mt19937_64 rng(63);
    const auto graph = random_connected_graph(120, 300, rng);
    std::vector<int> labels(120, kUnlabeled);
    for (Index i = 0; i < 120; i += 10) labels[static_cast<std::size_t>(i)] = static_cast<int>(i / 10 % 3);
    const IndicatorSolver solver(graph, labels, tight(Method::WeCURE));
    // Each indicator must equal a fresh assemble-and-solve with its own g.
    for (int c = 0; c < 3; ++c) {
        Observations obs;
        for (Index i = 0; i < 120; ++i) {
            if (labels[static_cast<std::size_t>(i)] == kUnlabeled) continue;
            obs.vertices.push_back(i);
            obs.values.push_back(labels[static_cast<std::size_t>(i)] == c ? 1.0 : 0.0);
        }
        const Eigen::VectorXd fresh = recover(graph, obs, tight(Method::WeCURE));
        EXPECT_LE((fresh - solver.indicator(c)).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Classify, BlobsFromOneLabelEach) {
    auto ds = two_blobs(3);
    ds.labels[5] = 0;
    ds.labels[55] = 1;
    SslParams p;
    p.graph = {5, 10};
    const auto result = classify(ds, p);
    for (Index i = 0; i < 80; ++i) EXPECT_EQ(result.predicted[static_cast<std::size_t>(i)], i < 40 ? 0 : 1);
    EXPECT_EQ(result.indicators.cols(), 2);
}

TEST(Classify, TiesGoToSmallestClass) {
    // The middle vertex of a symmetric path sees both classes equally.
    const auto graph = SparseWeightGraph::from_edges(3, std::vector<T>{{0, 1, 0.5}, {1, 2, 0.5}});
    const std::vector<int> labels{7, kUnlabeled, 3};
    const auto result = classify(graph, labels, tight(Method::LDMM));
    EXPECT_EQ(result.indicators(1, 0), result.indicators(1, 1));
    EXPECT_EQ(result.predicted[1], 3);
}

TEST(Classify, ArgmaxStableUnderPositiveScaling) {
    std::mt19937_64 rng(64);
    const auto graph = random_connected_graph(150, 400, rng);
    std::vector<int> labels(150, kUnlabeled);
    for (Index i = 0; i < 150; i += 9) labels[static_cast<std::size_t>(i)] = static_cast<int>(i % 5);
    const IndicatorSolver solver(graph, labels, tight(Method::WeCURE));
    const Eigen::MatrixXd phi = solver.all_indicators();
    // Scaling g scales phi, because the system is linear in g.
    for (double s : {0.25, 3.0}) {
        for (std::size_t c = 0; c < solver.classes().size(); ++c) {
            std::vector<double> g;
            for (Index v : solver.system().labeled()) g.push_back(labels[static_cast<std::size_t>(v)] == solver.classes()[c] ? s : 0.0);
            const Eigen::VectorXd scaled = recover(solver.system(), g, tight(Method::WeCURE));
            EXPECT_LE((scaled - s * phi.col(static_cast<Index>(c))).cwiseAbs().maxCoeff(), 1e-9 * s);
        }
        Index same = 0;
        for (Index i = 0; i < 150; ++i) {
            Index a, b;
            phi.row(i).maxCoeff(&a);
            (s * phi.row(i)).maxCoeff(&b);
            same += a == b;
        }
        EXPECT_EQ(same, 150);
    }
}

TEST(Classify, Deterministic) {
    std::mt19937_64 rng(65);
    const auto graph = random_connected_graph(300, 900, rng);
    std::vector<int> truth(300);
    for (Index i = 0; i < 300; ++i) truth[static_cast<std::size_t>(i)] = static_cast<int>(i % 4);
    const auto chosen = sample_labeled_set(truth, 30, 99);
    std::vector<int> labels(300, kUnlabeled);
    for (Index v : chosen) labels[static_cast<std::size_t>(v)] = truth[static_cast<std::size_t>(v)];
    RecoveryParams p;
    const auto a = classify(graph, labels, p);
    const auto b = classify(graph, labels, p);
    EXPECT_EQ(a.predicted, b.predicted);
    EXPECT_TRUE((a.indicators.array() == b.indicators.array()).all());
}

TEST(Accuracy, Examples) {
    EXPECT_EQ(accuracy({1, 2, 3}, {1, 2, 3}, {}), 1.0);
    EXPECT_EQ(accuracy({1, 1, 1}, {2, 2, 2}, {}), 0.0);
    EXPECT_EQ(accuracy({1, 2, 3, 4}, {1, 2, 3, 0}, {}), 0.75);
    EXPECT_EQ(accuracy({1, 2, 3, 4}, {9, 2, 3, 4}, {0}), 1.0);
    EXPECT_EQ(accuracy({1, 2}, {3, 4}, {0, 1}), 1.0);
    EXPECT_THROW(accuracy({1, 2}, {1}, {}), InvalidArgument);
}

TEST(SampleLabeledSet, Properties) {
    std::vector<int> truth(500);
    for (std::size_t i = 0; i < truth.size(); ++i) truth[i] = static_cast<int>(i % 10);
    truth[7] = kUnlabeled;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = sample_labeled_set(truth, 40, seed);
        ASSERT_EQ(s.size(), 40u);
        EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
        EXPECT_EQ(std::set<Index>(s.begin(), s.end()).size(), 40u);
        std::set<int> classes;
        for (Index v : s) {
            EXPECT_NE(truth[static_cast<std::size_t>(v)], kUnlabeled);
            classes.insert(truth[static_cast<std::size_t>(v)]);
        }
        EXPECT_EQ(classes.size(), 10u);
        EXPECT_EQ(s, sample_labeled_set(truth, 40, seed));
    }
    EXPECT_NE(sample_labeled_set(truth, 40, 1), sample_labeled_set(truth, 40, 2));
}

TEST(SampleLabeledSet, GivesUpWhenClassesCannotAllAppear) {
    std::vector<int> truth{0, 1, 2, 3};
    EXPECT_THROW(sample_labeled_set(truth, 2, 0), InvalidArgument);
    EXPECT_THROW(sample_labeled_set(truth, 5, 0), InvalidArgument);
    EXPECT_EQ(sample_labeled_set(truth, 4, 0), (std::vector<Index>{0, 1, 2, 3}));
}
