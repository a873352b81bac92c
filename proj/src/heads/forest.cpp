#include "eegclf/heads/forest.hpp"

#include "eegclf/rng.hpp"
#include "eegclf/threading.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace eegclf::heads {

namespace {

using I128 = __int128;

struct SplitScore {
    // g = sum_L c^2/N_L + sum_R c^2/N_R as the exact rational num/den
    std::int64_t num = 0;
    std::int64_t den = 1;

    bool better_than(const SplitScore& o) const {
        return static_cast<I128>(num) * o.den > static_cast<I128>(o.num) * den;
    }
    bool improves_over(std::int64_t parent_sq, std::int64_t parent_n) const {
        return static_cast<I128>(num) * parent_n > static_cast<I128>(parent_sq) * den;
    }
};

struct BestSplit {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    SplitScore score;
};

struct Grower {
    const FeatureSet& data;
    const ForestParams& params;
    Tree& tree;
    RandomStream& rng;
    std::size_t mtry;
    bool degenerate_root = false;

    // scratch
    std::vector<std::uint32_t> sorted;
    std::vector<std::size_t> feature_pool;

    Grower(const FeatureSet& d, const ForestParams& p, Tree& t, RandomStream& r)
        : data(d), params(p), tree(t), rng(r) {
        mtry = p.feature_subsample == 0
                   ? static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(d.dim))))
                   : std::min(p.feature_subsample, d.dim);
        feature_pool.resize(d.dim);
        std::iota(feature_pool.begin(), feature_pool.end(), std::size_t{0});
    }

    std::array<std::uint32_t, 3> count_classes(const std::vector<std::uint32_t>& ids) const {
        std::array<std::uint32_t, 3> c{};
        for (auto id : ids) ++c[static_cast<std::size_t>(data.y[tree.sample_ids[id]])];
        return c;
    }

    static std::int64_t sum_sq(const std::array<std::uint32_t, 3>& c) {
        std::int64_t s = 0;
        for (auto v : c) s += static_cast<std::int64_t>(v) * v;
        return s;
    }

    double value_of(std::uint32_t id, std::size_t f) const {
        return data.row(tree.sample_ids[id])[f];
    }

    // Features examined this node, ascending so tie-breaking is by index.
    std::vector<std::size_t> draw_features() {
        if (mtry >= data.dim) return feature_pool;
        std::vector<std::size_t> pool = feature_pool;
        for (std::size_t i = 0; i < mtry; ++i) {
            const auto j = static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(pool.size()) - 1));
            std::swap(pool[i], pool[j]);
        }
        pool.resize(mtry);
        std::sort(pool.begin(), pool.end());
        return pool;
    }

    BestSplit find_split(const std::vector<std::uint32_t>& ids,
                         const std::array<std::uint32_t, 3>& counts) {
        const auto n = static_cast<std::int64_t>(ids.size());
        const std::int64_t parent_sq = sum_sq(counts);
        BestSplit best;

        for (std::size_t f : draw_features()) {
            sorted = ids;
            std::stable_sort(sorted.begin(), sorted.end(), [&](std::uint32_t a, std::uint32_t b) {
                return value_of(a, f) < value_of(b, f);
            });
            std::array<std::uint32_t, 3> left{};
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                ++left[static_cast<std::size_t>(data.y[tree.sample_ids[sorted[i]]])];
                const double v = value_of(sorted[i], f);
                const double vn = value_of(sorted[i + 1], f);
                if (!(vn > v)) continue; // split only between distinct values
                const auto nl = static_cast<std::int64_t>(i + 1);
                const std::int64_t nr = n - nl;
                if (nl < static_cast<std::int64_t>(params.min_leaf) ||
                    nr < static_cast<std::int64_t>(params.min_leaf))
                    continue;
                std::array<std::uint32_t, 3> right{};
                for (int c = 0; c < 3; ++c)
                    right[static_cast<std::size_t>(c)] =
                        counts[static_cast<std::size_t>(c)] - left[static_cast<std::size_t>(c)];
                SplitScore s;
                s.num = sum_sq(left) * nr + sum_sq(right) * nl;
                s.den = nl * nr;
                if (!s.improves_over(parent_sq, n)) continue;
                const double thr = (v + vn) / 2.0;
                bool take = !best.found || s.better_than(best.score);
                if (!take && !best.score.better_than(s))
                    take = f < best.feature || (f == best.feature && thr < best.threshold);
                if (take) {
                    best.found = true;
                    best.feature = f;
                    best.threshold = thr;
                    best.score = s;
                }
            }
        }
        return best;
    }

    std::int32_t grow(std::vector<std::uint32_t> ids, std::size_t depth) {
        const auto node_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        const auto counts = count_classes(ids);
        const bool pure = std::count_if(counts.begin(), counts.end(),
                                        [](std::uint32_t c) { return c > 0; }) <= 1;
        const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;

        BestSplit split;
        if (!pure && !depth_capped && ids.size() >= 2 * params.min_leaf)
            split = find_split(ids, counts);

        if (!split.found) {
            TreeNode& leaf = tree.nodes[static_cast<std::size_t>(node_id)];
            leaf.is_leaf = true;
            leaf.counts = counts;
            leaf.total = static_cast<std::uint32_t>(ids.size());
            tree.leaf_samples.push_back(std::move(ids));
            // leaf_samples index == count of leaves so far; remember it in `feature`
            tree.nodes[static_cast<std::size_t>(node_id)].feature =
                static_cast<std::uint32_t>(tree.leaf_samples.size() - 1);
            if (node_id == 0 && !pure) degenerate_root = true;
            return node_id;
        }

        std::vector<std::uint32_t> left_ids, right_ids;
        for (auto id : ids) {
            if (value_of(id, split.feature) <= split.threshold) left_ids.push_back(id);
            else right_ids.push_back(id);
        }
        ids.clear();
        ids.shrink_to_fit();

        const std::int32_t left = grow(std::move(left_ids), depth + 1);
        const std::int32_t right = grow(std::move(right_ids), depth + 1);
        TreeNode& node = tree.nodes[static_cast<std::size_t>(node_id)];
        node.is_leaf = false;
        node.feature = static_cast<std::uint32_t>(split.feature);
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_id;
    }
};

} // namespace

std::int32_t Tree::leaf_for(const double* features, std::size_t dim) const {
    (void)dim;
    std::int32_t cur = 0;
    while (!nodes[static_cast<std::size_t>(cur)].is_leaf) {
        const TreeNode& n = nodes[static_cast<std::size_t>(cur)];
        cur = features[n.feature] <= n.threshold ? n.left : n.right;
    }
    return cur;
}

std::array<double, 3> ForestModel::tree_probs(std::size_t tree, const double* features) const {
    const Tree& t = trees[tree];
    const TreeNode& leaf = t.nodes[static_cast<std::size_t>(t.leaf_for(features, dim))];
    std::array<double, 3> p{};
    for (int c = 0; c < 3; ++c)
        p[static_cast<std::size_t>(c)] =
            static_cast<double>(leaf.counts[static_cast<std::size_t>(c)]) / leaf.total;
    return p;
}

std::vector<double> ForestModel::tree_weights(std::size_t tree, const double* features) const {
    const Tree& t = trees[tree];
    const TreeNode& leaf = t.nodes[static_cast<std::size_t>(t.leaf_for(features, dim))];
    std::vector<double> w(t.sample_ids.size(), 0.0);
    const auto& members = t.leaf_samples[leaf.feature];
    for (auto id : members) w[id] = 1.0 / static_cast<double>(leaf.total);
    return w;
}

ForestModel train_forest(const FeatureSet& data, const ForestParams& params) {
    if (data.size() == 0) throw HeadError("train_forest: empty training set");
    if (params.trees < 1) throw HeadError("train_forest: need at least one tree");
    std::array<bool, 3> seen{};
    for (int label : data.y) {
        if (label < 0 || label >= 3) throw HeadError("train_forest: class id out of range");
        seen[static_cast<std::size_t>(label)] = true;
    }
    for (int c = 0; c < 3; ++c)
        if (!seen[static_cast<std::size_t>(c)])
            throw HeadError("train_forest: class " + std::to_string(c) + " absent from training set");

    ForestModel model;
    model.dim = data.dim;
    model.params = params;
    model.trees.resize(params.trees);

    std::vector<char> degenerate(params.trees, 0);
    parallel_items(params.trees, [&](std::size_t ti) {
        RandomStream rng(derive_seed(params.seed, {0xf0, ti}));
        Tree& tree = model.trees[ti];
        const auto n = static_cast<std::uint32_t>(data.size());
        tree.sample_ids.resize(n);
        if (params.bootstrap) {
            for (auto& id : tree.sample_ids)
                id = static_cast<std::uint32_t>(rng.uniform_int(0, static_cast<std::int64_t>(n) - 1));
        } else {
            std::iota(tree.sample_ids.begin(), tree.sample_ids.end(), 0u);
        }
        std::vector<std::uint32_t> ids(n);
        std::iota(ids.begin(), ids.end(), 0u);
        Grower grower(data, params, tree, rng);
        grower.grow(std::move(ids), 0);
        degenerate[ti] = grower.degenerate_root ? 1 : 0;
    });
    for (std::size_t ti = 0; ti < params.trees; ++ti)
        if (degenerate[ti]) model.degenerate_trees.push_back(ti);
    return model;
}

ClassProbs forest_probs(const ForestModel& model, const std::vector<double>& features) {
    if (features.size() != model.dim)
        throw HeadError("forest_probs: feature dimension " + std::to_string(features.size()) +
                        " does not match training dimension " + std::to_string(model.dim));
    ClassProbs out;
    out.source = ProbSource::forest;
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const auto p = model.tree_probs(t, features.data());
        for (std::size_t c = 0; c < 3; ++c) out.p[c] += p[c];
    }
    for (auto& v : out.p) v /= static_cast<double>(model.trees.size());
    return out;
}

} // namespace eegclf::heads
