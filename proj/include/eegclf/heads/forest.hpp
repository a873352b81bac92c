#pragma once

#include "eegclf/heads/class_probs.hpp"

#include <cstdint>
#include <vector>

namespace eegclf::heads {

// Labeled feature vectors, row-major.
struct FeatureSet {
    std::size_t dim = 0;
    std::vector<double> x; // n x dim
    std::vector<int> y;    // n class ids

    std::size_t size() const { return y.size(); }
    const double* row(std::size_t i) const { return x.data() + i * dim; }
    void push(const double* features, int label) {
        x.insert(x.end(), features, features + dim);
        y.push_back(label);
    }
};

struct ForestParams {
    std::size_t trees = 100;            // M
    std::size_t max_depth = 0;          // 0 = unlimited
    std::size_t min_leaf = 1;
    std::size_t feature_subsample = 0;  // 0 = ceil(sqrt(dim)), per node
    bool bootstrap = true;
    std::uint64_t seed = 1;
};

struct TreeNode {
    bool is_leaf = true;
    std::uint32_t feature = 0;
    double threshold = 0.0;       // x[feature] <= threshold goes left
    std::int32_t left = -1, right = -1;
    std::array<std::uint32_t, 3> counts{}; // leaf class counts
    std::uint32_t total = 0;
};

// CART tree grown with exact integer Gini comparisons. Split convention,
// shared with the exhaustive test oracle:
//   - thresholds are midpoints between consecutive distinct feature values
//   - maximize sum_L c^2/N_L + sum_R c^2/N_R with strict improvement over
//     the unsplit node, compared in exact integer arithmetic
//   - ties prefer the lower feature index, then the lower threshold
struct Tree {
    std::vector<TreeNode> nodes; // root at 0
    // per-leaf training sample ids (positions in the tree's bootstrap sample),
    // kept for weight-function instrumentation; not serialized
    std::vector<std::vector<std::uint32_t>> leaf_samples;
    std::vector<std::uint32_t> sample_ids; // bootstrap draw: positions in the training set

    std::int32_t leaf_for(const double* features, std::size_t dim) const;
};

struct ForestModel {
    std::size_t dim = 0;
    std::vector<Tree> trees;
    ForestParams params;
    std::vector<std::size_t> degenerate_trees; // impure root collapsed to a leaf

    // Per-tree prediction as a leaf class-frequency vector.
    std::array<double, 3> tree_probs(std::size_t tree, const double* features) const;
    // Explicit weight function of one tree: non-negative weights over that
    // tree's training points (by position in sample_ids), summing to one.
    std::vector<double> tree_weights(std::size_t tree, const double* features) const;
};

struct HeadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ForestModel train_forest(const FeatureSet& data, const ForestParams& params);

// Mean of the per-tree leaf frequency vectors; output lies on the simplex.
ClassProbs forest_probs(const ForestModel& model, const std::vector<double>& features);

} // namespace eegclf::heads
