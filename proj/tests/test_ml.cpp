#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "oracles.hpp"
#include "respilab/ml.hpp"

using namespace respilab;

namespace {

ml::Dataset random_dataset(std::size_t n, std::size_t p, int n_classes, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    std::uniform_int_distribution<int> label(0, n_classes - 1);
    ml::Dataset data;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row(p);
        for (double& v : row) v = value(rng);
        data.add(std::move(row), label(rng));
    }
    return data;
}

std::vector<int> all_indices(const ml::Dataset& data) {
    std::vector<int> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    return idx;
}

}  // namespace

TEST_SUITE("ml") {

TEST_CASE("impurity identities") {
    const std::vector<int> pure = {12, 0, 0};
    CHECK(ml::gini(pure) == 0.0);
    CHECK(ml::entropy(pure) == 0.0);

    const std::vector<int> even = {25, 25};
    CHECK(ml::gini(even) == 0.5);
    CHECK(ml::entropy(even) == 1.0);

    const std::vector<int> uniform8(8, 7);
    CHECK(ml::gini(uniform8) == 0.875);
    CHECK(ml::entropy(uniform8) == 3.0);

    const std::vector<int> empty = {0, 0};
    CHECK_THROWS_AS(ml::gini(empty), std::invalid_argument);
    CHECK_THROWS_AS(ml::entropy(empty), std::invalid_argument);
}

TEST_CASE("split quality: separating, useless and degenerate candidates") {
    ml::Dataset data;
    data.add({1.0}, 0);
    data.add({2.0}, 0);
    data.add({10.0}, 1);
    data.add({11.0}, 1);
    const auto idx = all_indices(data);

    const auto perfect = ml::split_quality(data, idx, {0, 6.0});
    REQUIRE(perfect.has_value());
    CHECK(*perfect == 0.0);

    // A threshold below every value leaves one side empty.
    CHECK_FALSE(ml::split_quality(data, idx, {0, 0.5}).has_value());

    // Equal class mix on both sides: weighted impurity equals the parent's.
    ml::Dataset mixed;
    mixed.add({1.0}, 0);
    mixed.add({2.0}, 1);
    mixed.add({3.0}, 0);
    mixed.add({4.0}, 1);
    const auto same = ml::split_quality(mixed, all_indices(mixed), {0, 2.5});
    REQUIRE(same.has_value());
    CHECK(*same == doctest::Approx(0.5));  // parent is 50/50 -> gini 0.5, gain 0
}

TEST_CASE("best split on the 1-D two-cluster example") {
    ml::Dataset data;
    data.add({1.0}, 0);
    data.add({2.0}, 0);
    data.add({10.0}, 1);
    data.add({11.0}, 1);
    const std::vector<int> features = {0};
    const auto best = ml::best_split(data, all_indices(data), features);
    REQUIRE(best.has_value());
    CHECK(best->split.feature == 0);
    CHECK(best->split.threshold == doctest::Approx(6.0));
    CHECK(best->quality == 0.0);
}

TEST_CASE("identical rows admit no usable split") {
    ml::Dataset data;
    for (int i = 0; i < 6; ++i) data.add({3.0, 3.0}, i % 2);
    const std::vector<int> features = {0, 1};
    CHECK_FALSE(ml::best_split(data, all_indices(data), features).has_value());
}

TEST_CASE("best split agrees with exhaustive search on random datasets") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const std::size_t n = 2 + splitmix64(seed) % 49;
        const int n_classes = 2 + static_cast<int>(splitmix64(seed + 1000) % 7);
        const auto data = random_dataset(n, 4, n_classes, 7000 + seed);
        const std::vector<int> features = {0, 1, 2, 3};

        const auto mine = ml::best_split(data, all_indices(data), features);
        const auto reference = oracles::exhaustive_best_split(data.x, data.y);
        REQUIRE(mine.has_value() == reference.has_value());
        if (mine) {
            CHECK(mine->split.feature == reference->feature);
            CHECK(mine->split.threshold == reference->threshold);
            CHECK(mine->quality == doctest::Approx(reference->quality).epsilon(1e-12));
        }
    }
}

TEST_CASE("single-class data fits to a lone leaf") {
    ml::Dataset data;
    for (int i = 0; i < 5; ++i) data.add({static_cast<double>(i)}, 2);
    const auto tree = ml::fit_tree(data, {});
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes.front().is_leaf());
    CHECK(tree.predict(std::vector<double>{99.0}) == 2);
    CHECK(tree.depth() == 0);
}

TEST_CASE("linearly separable two-class data needs one split") {
    ml::Dataset data;
    for (int i = 0; i < 10; ++i) data.add({static_cast<double>(i), 0.5}, i < 5 ? 0 : 1);
    const auto tree = ml::fit_tree(data, {});
    CHECK(tree.depth() == 1);
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(tree.predict(data.x[i]) == data.y[i]);
    }
}

TEST_CASE("depth-limited trees trade training accuracy for size") {
    const auto data = random_dataset(200, 4, 8, 11);
    const auto stump = ml::fit_tree(data, {1, 2, ml::Impurity::gini});
    const auto full = ml::fit_tree(data, {});

    auto train_accuracy = [&](const ml::DecisionTreeModel& tree) {
        int hits = 0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (tree.predict(data.x[i]) == data.y[i]) ++hits;
        }
        return static_cast<double>(hits) / static_cast<double>(data.size());
    };
    CHECK(stump.depth() == 1);
    CHECK(train_accuracy(stump) < train_accuracy(full));
    CHECK(train_accuracy(full) == 1.0);  // random features: no conflicting duplicates
}

TEST_CASE("trees respect the depth cap and stop on purity or size") {
    const auto data = random_dataset(300, 4, 8, 13);
    for (int cap : {1, 2, 4, 8}) {
        const auto tree = ml::fit_tree(data, {cap, 2, ml::Impurity::gini});
        CHECK(tree.depth() <= cap);
    }

    const auto tree = ml::fit_tree(data, {});
    // Every leaf is pure, too small to split, or failed to find a split.
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, depth] = stack.back();
        stack.pop_back();
        const auto& node = tree.nodes[static_cast<std::size_t>(id)];
        if (!node.is_leaf()) {
            stack.emplace_back(node.left, depth + 1);
            stack.emplace_back(node.right, depth + 1);
            continue;
        }
        const int total = std::accumulate(node.class_counts.begin(), node.class_counts.end(), 0);
        const int top = *std::max_element(node.class_counts.begin(), node.class_counts.end());
        const bool pure = top == total;
        const bool too_small = total < 2;
        CHECK((pure || too_small));
    }
}

TEST_CASE("every executed split has non-negative information gain") {
    for (std::uint64_t seed = 20; seed < 24; ++seed) {
        const auto data = random_dataset(150, 4, 6, seed);
        for (auto kind : {ml::Impurity::gini, ml::Impurity::entropy}) {
            const auto tree = ml::fit_tree(data, {ml::kUnlimitedDepth, 2, kind});
            for (const auto& node : tree.nodes) {
                if (node.is_leaf()) continue;
                const auto& left = tree.nodes[static_cast<std::size_t>(node.left)];
                const auto& right = tree.nodes[static_cast<std::size_t>(node.right)];
                const double parent = ml::impurity(node.class_counts, kind);
                const double n_l = std::accumulate(left.class_counts.begin(),
                                                   left.class_counts.end(), 0.0);
                const double n_r = std::accumulate(right.class_counts.begin(),
                                                   right.class_counts.end(), 0.0);
                const double child =
                    (n_l / (n_l + n_r)) * ml::impurity(left.class_counts, kind) +
                    (n_r / (n_l + n_r)) * ml::impurity(right.class_counts, kind);
                CHECK(parent - child >= -1e-12);
            }
        }
    }
}

TEST_CASE("monotone feature transforms leave predictions unchanged") {
    const auto data = random_dataset(120, 4, 5, 31);
    const auto test_points = random_dataset(40, 4, 5, 32);

    auto transformed = data;
    auto transformed_points = test_points;
    auto warp = [](double v) { return v * v * v + 2.0 * v; };  // strictly increasing
    for (auto& row : transformed.x) row[2] = warp(row[2]);
    for (auto& row : transformed_points.x) row[2] = warp(row[2]);

    const auto base = ml::fit_tree(data, {});
    const auto warped = ml::fit_tree(transformed, {});
    for (std::size_t i = 0; i < test_points.size(); ++i) {
        CHECK(base.predict(test_points.x[i]) == warped.predict(transformed_points.x[i]));
    }
}

TEST_CASE("majority vote resolves ties toward the lowest label") {
    CHECK(ml::majority_vote(std::vector<int>{2, 5, 2}, 8) == 2);
    CHECK(ml::majority_vote(std::vector<int>{1, 2}, 8) == 1);
    CHECK(ml::majority_vote(std::vector<int>{4, 4, 4}, 8) == 4);
}

TEST_CASE("a one-tree forest without bootstrap is the plain tree") {
    const auto data = random_dataset(80, 4, 4, 41);
    ml::ForestHyperparams fh;
    fh.n_trees = 1;
    fh.feature_subset_size = 4;
    fh.bootstrap = false;
    fh.seed = 5;
    const auto forest = ml::fit_forest(data, fh, {});
    const auto tree = ml::fit_tree(data, {});

    const auto probes = random_dataset(50, 4, 4, 42);
    for (const auto& row : probes.x) {
        CHECK(forest.predict(row) == tree.predict(row));
    }
}

TEST_CASE("forests are deterministic under their seed") {
    const auto data = random_dataset(100, 4, 6, 51);
    ml::ForestHyperparams fh;
    fh.seed = 1234;
    const auto a = ml::fit_forest(data, fh, {});
    const auto b = ml::fit_forest(data, fh, {});
    REQUIRE(a.trees.size() == b.trees.size());
    for (std::size_t t = 0; t < a.trees.size(); ++t) {
        REQUIRE(a.trees[t].nodes.size() == b.trees[t].nodes.size());
        for (std::size_t i = 0; i < a.trees[t].nodes.size(); ++i) {
            CHECK(a.trees[t].nodes[i].feature == b.trees[t].nodes[i].feature);
            CHECK(a.trees[t].nodes[i].threshold == b.trees[t].nodes[i].threshold);
        }
    }
}

TEST_CASE("per-node feature subsets actually bite") {
    // Feature 0 separates perfectly; with k=1 some nodes must draw other
    // features, so trees diverge from the single-feature ideal.
    ml::Dataset data;
    Rng rng(61);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    for (int i = 0; i < 60; ++i) {
        const int label = i % 2;
        data.add({label * 10.0 + noise(rng) * 0.1, noise(rng), noise(rng), noise(rng)}, label);
    }
    ml::ForestHyperparams fh;
    fh.n_trees = 20;
    fh.feature_subset_size = 1;
    fh.seed = 62;
    const auto forest = ml::fit_forest(data, fh, {});
    bool used_other_feature = false;
    for (const auto& tree : forest.trees) {
        if (!tree.nodes.front().is_leaf() && tree.nodes.front().feature != 0) {
            used_other_feature = true;
        }
    }
    CHECK(used_other_feature);

    // With every feature available each root split picks the separator.
    fh.feature_subset_size = 4;
    const auto wide = ml::fit_forest(data, fh, {});
    for (const auto& tree : wide.trees) {
        REQUIRE_FALSE(tree.nodes.front().is_leaf());
        CHECK(tree.nodes.front().feature == 0);
    }
}

TEST_CASE("all trees agreeing is the forest prediction") {
    ml::Dataset data;
    for (int i = 0; i < 20; ++i) data.add({static_cast<double>(i % 3)}, i % 3);
    ml::ForestHyperparams fh;
    fh.n_trees = 7;
    fh.feature_subset_size = 1;
    fh.seed = 3;
    const auto forest = ml::fit_forest(data, fh, {});
    CHECK(forest.predict(std::vector<double>{1.0}) == 1);
}

TEST_CASE("tree model text round trip preserves predictions") {
    const auto data = random_dataset(90, 4, 5, 71);
    const auto tree = ml::fit_tree(data, {6, 2, ml::Impurity::entropy});

    std::stringstream buffer;
    ml::write_model(buffer, tree);
    const auto loaded = ml::read_model(buffer);
    CHECK_FALSE(loaded.is_forest());

    const auto probes = random_dataset(60, 4, 5, 72);
    for (const auto& row : probes.x) {
        CHECK(loaded.predict(row) == tree.predict(row));
    }
}

TEST_CASE("forest model text round trip preserves predictions") {
    const auto data = random_dataset(90, 4, 5, 73);
    ml::ForestHyperparams fh;
    fh.seed = 99;
    const auto forest = ml::fit_forest(data, fh, {});

    std::stringstream buffer;
    ml::write_model(buffer, forest);
    const auto loaded = ml::read_model(buffer);
    CHECK(loaded.is_forest());

    const auto probes = random_dataset(60, 4, 5, 74);
    for (const auto& row : probes.x) {
        CHECK(loaded.predict(row) == forest.predict(row));
    }
}

TEST_CASE("malformed model text is rejected with a diagnostic") {
    std::stringstream bad1("not-a-model v1\n");
    CHECK_THROWS_AS(ml::read_model(bad1), std::runtime_error);

    std::stringstream bad2("respilab-model v1\nkind tree\nclasses 2\nfeatures 1\n"
                           "tree 0 nodes 1\nnode 0 split 5 0.5 7 8 1 1\n");
    CHECK_THROWS_AS(ml::read_model(bad2), std::runtime_error);
}

}  // TEST_SUITE
