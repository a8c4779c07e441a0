#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "wecure/ssl.hpp"

namespace wecure {

namespace {

Observations labeled_observations(const std::vector<int>& labels) {
    Observations obs;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != kUnlabeled) {
            obs.vertices.push_back(static_cast<Index>(i));
            obs.values.push_back(0.0);
        }
    }
    return obs;
}

std::vector<int> distinct_classes(const std::vector<int>& labels) {
    std::set<int> s;
    for (int l : labels) {
        if (l != kUnlabeled) s.insert(l);
    }
    return {s.begin(), s.end()};
}

}  // namespace

void LabeledDataset::validate() const {
    if (static_cast<Index>(labels.size()) != cloud.size()) {
        throw InvalidArgument("LabeledDataset: " + std::to_string(labels.size()) + " labels for " +
                              std::to_string(cloud.size()) + " points");
    }
    bool any = false;
    for (int l : labels) {
        if (l < 0 && l != kUnlabeled) throw InvalidArgument("LabeledDataset: negative class id");
        any = any || l != kUnlabeled;
    }
    if (!any) throw InvalidArgument("LabeledDataset: no labeled points");
}

std::vector<int> LabeledDataset::classes() const { return distinct_classes(labels); }

std::vector<Index> LabeledDataset::labeled_vertices() const { return labeled_observations(labels).vertices; }

IndicatorSolver::IndicatorSolver(const SparseWeightGraph& graph, std::vector<int> labels, const RecoveryParams& params)
    : labels_(std::move(labels)), classes_(distinct_classes(labels_)), params_(params) {
    if (static_cast<Index>(labels_.size()) != graph.size()) {
        throw InvalidArgument("IndicatorSolver: label vector length does not match graph size");
    }
    system_ = assemble_system(graph, labeled_observations(labels_), params_);
}

Eigen::VectorXd IndicatorSolver::indicator(int class_id) const {
    if (!std::binary_search(classes_.begin(), classes_.end(), class_id)) {
        throw InvalidArgument("indicator: class " + std::to_string(class_id) + " has no labeled points");
    }
    std::vector<double> g;
    g.reserve(system_.labeled().size());
    for (Index v : system_.labeled()) g.push_back(labels_[static_cast<std::size_t>(v)] == class_id ? 1.0 : 0.0);
    return recover(system_, g, params_);
}

Eigen::MatrixXd IndicatorSolver::all_indicators() const {
    Eigen::MatrixXd phi(system_.graph_size(), static_cast<Index>(classes_.size()));
    for (std::size_t c = 0; c < classes_.size(); ++c) phi.col(static_cast<Index>(c)) = indicator(classes_[c]);
    return phi;
}

Eigen::VectorXd interpolate_indicator(const LabeledDataset& ds, int class_id, const SslParams& params) {
    ds.validate();
    const SparseWeightGraph graph = build_weight_graph(ds.cloud, params.graph);
    return IndicatorSolver(graph, ds.labels, params.recovery).indicator(class_id);
}

Classification classify(const SparseWeightGraph& graph, const std::vector<int>& labels, const RecoveryParams& params) {
    const IndicatorSolver solver(graph, labels, params);
    Classification out;
    out.classes = solver.classes();
    out.indicators = solver.all_indicators();
    out.predicted = labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != kUnlabeled) continue;
        Index best = 0;
        // Strict comparison keeps the first (smallest) class on ties.
        for (Index c = 1; c < out.indicators.cols(); ++c) {
            if (out.indicators(static_cast<Index>(i), c) > out.indicators(static_cast<Index>(i), best)) best = c;
        }
        out.predicted[i] = out.classes[static_cast<std::size_t>(best)];
    }
    return out;
}

Classification classify(const LabeledDataset& ds, const SslParams& params) {
    ds.validate();
    const SparseWeightGraph graph = build_weight_graph(ds.cloud, params.graph);
    return classify(graph, ds.labels, params.recovery);
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth, const std::vector<Index>& exclude) {
    if (predicted.size() != truth.size()) {
        throw InvalidArgument("accuracy: " + std::to_string(predicted.size()) + " predictions for " +
                              std::to_string(truth.size()) + " ground-truth labels");
    }
    std::vector<char> skip(truth.size(), 0);
    for (Index v : exclude) {
        if (v < 0 || v >= static_cast<Index>(truth.size())) throw InvalidArgument("accuracy: excluded id out of range");
        skip[static_cast<std::size_t>(v)] = 1;
    }
    std::size_t total = 0, hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (skip[i]) continue;
        ++total;
        hits += predicted[i] == truth[i] ? 1 : 0;
    }
    return total == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(total);
}

std::vector<Index> sample_labeled_set(const std::vector<int>& truth, Index count, std::uint64_t seed, int max_attempts) {
    std::vector<Index> pool;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] != kUnlabeled) pool.push_back(static_cast<Index>(i));
    }
    const Index n = static_cast<Index>(pool.size());
    if (count < 1 || count > n) throw InvalidArgument("sample_labeled_set: count must be in [1, labeled points]");
    const std::vector<int> classes = distinct_classes(truth);

    std::mt19937_64 rng(seed);
    std::vector<Index> perm;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        perm = pool;
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Index> picked(perm.begin(), perm.begin() + count);
        std::set<int> seen;
        for (Index v : picked) seen.insert(truth[static_cast<std::size_t>(v)]);
        if (seen.size() == classes.size()) {
            std::sort(picked.begin(), picked.end());
            return picked;
        }
    }
    throw InvalidArgument("sample_labeled_set: no draw of " + std::to_string(count) + " points covered all " +
                          std::to_string(classes.size()) + " classes in " + std::to_string(max_attempts) + " attempts");
}

}  // namespace wecure
