#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "respilab/rng.hpp"

namespace respilab::ml {

/// Row-major labeled dataset.
struct Dataset {
    std::vector<std::vector<double>> x;
    std::vector<int> y;

    std::size_t size() const { return y.size(); }
    std::size_t n_features() const { return x.empty() ? 0 : x.front().size(); }
    int n_classes() const;  // max label + 1

    void add(std::vector<double> row, int label);
    Dataset subset(std::span<const int> indices) const;
};

// Gini impurity 1 - sum p_i^2 over class proportions.
// Throws std::invalid_argument on an empty node (total count 0).
double gini(std::span<const int> class_counts);

// Shannon entropy -sum p_i log2 p_i, with 0*log0 = 0.
double entropy(std::span<const int> class_counts);

enum class Impurity { gini, entropy };

double impurity(std::span<const int> class_counts, Impurity kind);

struct SplitCandidate {
    int feature = 0;
    double threshold = 0.0;  // left: value <= threshold, right: value > threshold
};

inline constexpr int kUnlimitedDepth = std::numeric_limits<int>::max();

struct TreeHyperparams {
    int max_depth = kUnlimitedDepth;  // >= 1
    int min_samples_split = 2;
    Impurity impurity = Impurity::gini;
};

// Weighted child impurity of the partition a candidate induces on the
// node samples; nullopt when the split is degenerate (one side empty).
std::optional<double> split_quality(const Dataset& data, std::span<const int> node_indices,
                                    const SplitCandidate& candidate,
                                    Impurity kind = Impurity::gini);

struct BestSplit {
    SplitCandidate split;
    double quality = 0.0;  // weighted child impurity of the chosen split
};

// Minimizes weighted child impurity over midpoint thresholds of every
// candidate feature. Ties resolve to the lowest feature index, then the
// lowest threshold. Returns nullopt when no usable split exists.
std::optional<BestSplit> best_split(const Dataset& data, std::span<const int> node_indices,
                                    std::span<const int> candidate_features,
                                    Impurity kind = Impurity::gini);

/// Flat-array tree node: internal nodes carry a split and child indices,
/// leaves carry the class histogram and the majority label.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<int> class_counts;
    int predicted = -1;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTreeModel {
    std::vector<TreeNode> nodes;  // preorder, root first
    TreeHyperparams hyper{};
    int n_classes = 0;
    int n_features = 0;

    int predict(std::span<const double> x) const;
    int depth() const;  // root-only tree has depth 0
};

// Greedy binary tree induction. Recursion stops at purity, max_depth,
// min_samples_split, or when no usable split exists. When
// feature_subset_size > 0 each node considers a fresh random subset of
// that many features drawn from *rng.
DecisionTreeModel fit_tree(const Dataset& data, const TreeHyperparams& hyper,
                           Rng* rng = nullptr, int feature_subset_size = 0);

struct ForestHyperparams {
    int n_trees = 12;
    int feature_subset_size = 2;  // 1 <= k < n_features
    int bootstrap_size = 0;       // 0 means n (dataset size)
    bool bootstrap = true;        // false: every tree sees the full training set
    std::uint64_t seed = 0;
};

struct RandomForestModel {
    std::vector<DecisionTreeModel> trees;
    ForestHyperparams hyper{};
    int n_classes = 0;
    int n_features = 0;

    int predict(std::span<const double> x) const;  // majority vote, ties to lowest label
};

// Bagged forest: each tree fits an independent bootstrap resample with a
// per-node random feature subset. Deterministic under the forest seed.
RandomForestModel fit_forest(const Dataset& data, const ForestHyperparams& fh,
                             const TreeHyperparams& th);

// Majority vote with ties resolved to the lowest label.
int majority_vote(std::span<const int> votes, int n_classes);

// Plain-text model serialization (node list with split feature, threshold,
// child indices and leaf counts); round-trips predictions exactly.
void write_model(std::ostream& os, const DecisionTreeModel& model);
void write_model(std::ostream& os, const RandomForestModel& model);

struct AnyModel {
    std::variant<DecisionTreeModel, RandomForestModel> model;

    int predict(std::span<const double> x) const;
    bool is_forest() const { return model.index() == 1; }
};

AnyModel read_model(std::istream& is);  // throws std::runtime_error on malformed input

}  // namespace respilab::ml
