#include "respilab/ml.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace respilab::ml {

int Dataset::n_classes() const {
    int top = -1;
    for (int label : y) top = std::max(top, label);
    return top + 1;
}

void Dataset::add(std::vector<double> row, int label) {
    if (!x.empty() && row.size() != x.front().size()) {
        throw std::invalid_argument("Dataset::add: inconsistent feature count");
    }
    if (label < 0) throw std::invalid_argument("Dataset::add: negative label");
    x.push_back(std::move(row));
    y.push_back(label);
}

Dataset Dataset::subset(std::span<const int> indices) const {
    Dataset out;
    out.x.reserve(indices.size());
    out.y.reserve(indices.size());
    for (int i : indices) {
        out.x.push_back(x.at(static_cast<std::size_t>(i)));
        out.y.push_back(y.at(static_cast<std::size_t>(i)));
    }
    return out;
}

namespace {

long total_count(std::span<const int> counts) {
    long total = 0;
    for (int c : counts) {
        if (c < 0) throw std::invalid_argument("impurity: negative class count");
        total += c;
    }
    return total;
}

}  // namespace

double gini(std::span<const int> class_counts) {
    const long total = total_count(class_counts);
    if (total == 0) throw std::invalid_argument("gini: empty node");
    double sum_sq = 0.0;
    for (int c : class_counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

double entropy(std::span<const int> class_counts) {
    const long total = total_count(class_counts);
    if (total == 0) throw std::invalid_argument("entropy: empty node");
    double acc = 0.0;
    for (int c : class_counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        acc -= p * std::log2(p);
    }
    return acc;
}

double impurity(std::span<const int> class_counts, Impurity kind) {
    return kind == Impurity::gini ? gini(class_counts) : entropy(class_counts);
}

namespace {

// Weighted child impurity from materialized count vectors. Every split
// evaluation funnels through here so candidates compare bit-identically.
double weighted_child_impurity(std::span<const int> left, std::span<const int> right,
                               Impurity kind) {
    const double n_left = static_cast<double>(total_count(left));
    const double n_right = static_cast<double>(total_count(right));
    const double n = n_left + n_right;
    return (n_left / n) * impurity(left, kind) + (n_right / n) * impurity(right, kind);
}

int argmax_count(std::span<const int> counts) {
    int best = 0;
    for (int c = 1; c < static_cast<int>(counts.size()); ++c) {
        if (counts[c] > counts[best]) best = c;  // ties keep the lowest label
    }
    return best;
}

}  // namespace

std::optional<double> split_quality(const Dataset& data, std::span<const int> node_indices,
                                    const SplitCandidate& candidate, Impurity kind) {
    const int n_classes = data.n_classes();
    std::vector<int> left(n_classes, 0), right(n_classes, 0);
    for (int i : node_indices) {
        const auto& row = data.x[static_cast<std::size_t>(i)];
        const int label = data.y[static_cast<std::size_t>(i)];
        if (row.at(static_cast<std::size_t>(candidate.feature)) <= candidate.threshold) {
            ++left[label];
        } else {
            ++right[label];
        }
    }
    if (total_count(left) == 0 || total_count(right) == 0) return std::nullopt;
    return weighted_child_impurity(left, right, kind);
}

std::optional<BestSplit> best_split(const Dataset& data, std::span<const int> node_indices,
                                    std::span<const int> candidate_features, Impurity kind) {
    const int n_classes = data.n_classes();
    const std::size_t n = node_indices.size();
    if (n < 2) return std::nullopt;

    std::vector<int> node_counts(n_classes, 0);
    for (int i : node_indices) ++node_counts[data.y[static_cast<std::size_t>(i)]];

    std::optional<BestSplit> best;
    std::vector<std::pair<double, int>> ordered(n);  // (value, label)

    for (int feature : candidate_features) {
        for (std::size_t j = 0; j < n; ++j) {
            const int idx = node_indices[j];
            ordered[j] = {data.x[static_cast<std::size_t>(idx)][static_cast<std::size_t>(feature)],
                          data.y[static_cast<std::size_t>(idx)]};
        }
        std::sort(ordered.begin(), ordered.end());

        std::vector<int> left(n_classes, 0);
        std::vector<int> right = node_counts;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            ++left[ordered[j].second];
            --right[ordered[j].second];
            if (ordered[j].first == ordered[j + 1].first) continue;  // not a boundary

            const double threshold = ordered[j].first + (ordered[j + 1].first - ordered[j].first) / 2.0;
            const double quality = weighted_child_impurity(left, right, kind);
            // Strict comparison over ascending features/thresholds keeps
            // ties at the lowest feature index, then the lowest threshold.
            if (!best || quality < best->quality) {
                best = BestSplit{{feature, threshold}, quality};
            }
        }
    }
    return best;
}

namespace {

struct TreeBuilder {
    const Dataset& data;
    const TreeHyperparams& hyper;
    Rng* rng;
    int feature_subset_size;
    int n_classes;
    std::vector<TreeNode> nodes;

    std::vector<int> node_features() {
        const int p = static_cast<int>(data.n_features());
        std::vector<int> all(static_cast<std::size_t>(p));
        std::iota(all.begin(), all.end(), 0);
        if (feature_subset_size <= 0 || feature_subset_size >= p || rng == nullptr) return all;
        // Partial Fisher-Yates, then ascending order for tie-break scans.
        for (int i = 0; i < feature_subset_size; ++i) {
            std::uniform_int_distribution<int> pick(i, p - 1);
            std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(*rng))]);
        }
        all.resize(static_cast<std::size_t>(feature_subset_size));
        std::sort(all.begin(), all.end());
        return all;
    }

    int build(std::vector<int>& indices, int depth) {
        std::vector<int> counts(n_classes, 0);
        for (int i : indices) ++counts[data.y[static_cast<std::size_t>(i)]];

        const int node_id = static_cast<int>(nodes.size());
        nodes.emplace_back();
        nodes[node_id].class_counts = counts;
        nodes[node_id].predicted = argmax_count(counts);

        const bool pure = std::count(counts.begin(), counts.end(), 0) == n_classes - 1;
        const bool too_small = static_cast<int>(indices.size()) < hyper.min_samples_split;
        if (pure || too_small || depth >= hyper.max_depth) return node_id;

        const std::vector<int> features = node_features();
        const auto split = best_split(data, indices, features, hyper.impurity);
        if (!split) return node_id;

        std::vector<int> left_idx, right_idx;
        left_idx.reserve(indices.size());
        right_idx.reserve(indices.size());
        for (int i : indices) {
            const double v = data.x[static_cast<std::size_t>(i)]
                                   [static_cast<std::size_t>(split->split.feature)];
            (v <= split->split.threshold ? left_idx : right_idx).push_back(i);
        }
        indices.clear();
        indices.shrink_to_fit();

        nodes[node_id].feature = split->split.feature;
        nodes[node_id].threshold = split->split.threshold;
        const int left_id = build(left_idx, depth + 1);
        nodes[node_id].left = left_id;
        const int right_id = build(right_idx, depth + 1);
        nodes[node_id].right = right_id;
        return node_id;
    }
};

}  // namespace

DecisionTreeModel fit_tree(const Dataset& data, const TreeHyperparams& hyper, Rng* rng,
                           int feature_subset_size) {
    if (data.size() == 0) throw std::invalid_argument("fit_tree: empty training set");
    if (hyper.max_depth < 1) throw std::invalid_argument("fit_tree: max_depth must be >= 1");

    DecisionTreeModel model;
    model.hyper = hyper;
    model.n_classes = data.n_classes();
    model.n_features = static_cast<int>(data.n_features());

    TreeBuilder builder{data, hyper, rng, feature_subset_size, model.n_classes, {}};
    std::vector<int> root(data.size());
    std::iota(root.begin(), root.end(), 0);
    builder.build(root, 0);
    model.nodes = std::move(builder.nodes);
    return model;
}

int DecisionTreeModel::predict(std::span<const double> x) const {
    const TreeNode* node = &nodes.front();
    while (!node->is_leaf()) {
        const double v = x[static_cast<std::size_t>(node->feature)];
        node = &nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    return node->predicted;
}

int DecisionTreeModel::depth() const {
    // Nodes are stored preorder; walk with explicit depths.
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int deepest = 0;
    while (!stack.empty()) {
        auto [id, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        const TreeNode& node = nodes[static_cast<std::size_t>(id)];
        if (!node.is_leaf()) {
            stack.emplace_back(node.left, d + 1);
            stack.emplace_back(node.right, d + 1);
        }
    }
    return deepest;
}

int majority_vote(std::span<const int> votes, int n_classes) {
    std::vector<int> counts(static_cast<std::size_t>(n_classes), 0);
    for (int v : votes) {
        if (v < 0 || v >= n_classes) throw std::invalid_argument("majority_vote: label out of range");
        ++counts[static_cast<std::size_t>(v)];
    }
    return argmax_count(counts);
}

RandomForestModel fit_forest(const Dataset& data, const ForestHyperparams& fh,
                             const TreeHyperparams& th) {
    if (data.size() == 0) throw std::invalid_argument("fit_forest: empty training set");
    if (fh.n_trees < 1) throw std::invalid_argument("fit_forest: n_trees must be >= 1");
    const int p = static_cast<int>(data.n_features());
    if (fh.feature_subset_size < 1 || fh.feature_subset_size > p) {
        throw std::invalid_argument("fit_forest: feature subset size out of range");
    }

    RandomForestModel model;
    model.hyper = fh;
    model.n_classes = data.n_classes();
    model.n_features = p;
    model.trees.reserve(static_cast<std::size_t>(fh.n_trees));

    const std::size_t bootstrap_n =
        fh.bootstrap_size > 0 ? static_cast<std::size_t>(fh.bootstrap_size) : data.size();

    for (int t = 0; t < fh.n_trees; ++t) {
        Rng rng(mix_seed(fh.seed, static_cast<std::uint64_t>(t)));
        std::vector<int> sample(bootstrap_n);
        if (fh.bootstrap) {
            std::uniform_int_distribution<int> pick(0, static_cast<int>(data.size()) - 1);
            for (auto& s : sample) s = pick(rng);
        } else {
            sample.resize(data.size());
            std::iota(sample.begin(), sample.end(), 0);
        }
        const Dataset resampled = data.subset(sample);
        // Forest trees keep the full forest label space even when a
        // bootstrap misses a class entirely.
        DecisionTreeModel tree = fit_tree(resampled, th, &rng, fh.feature_subset_size);
        if (tree.n_classes < model.n_classes) tree.n_classes = model.n_classes;
        model.trees.push_back(std::move(tree));
    }
    return model;
}

int RandomForestModel::predict(std::span<const double> x) const {
    std::vector<int> votes;
    votes.reserve(trees.size());
    for (const auto& tree : trees) votes.push_back(tree.predict(x));
    return majority_vote(votes, n_classes);
}

int AnyModel::predict(std::span<const double> x) const {
    return std::visit([&](const auto& m) { return m.predict(x); }, model);
}

// --- serialization ------------------------------------------------------

namespace {

constexpr const char* kMagic = "respilab-model";
constexpr const char* kVersion = "v1";

const char* impurity_name(Impurity kind) {
    return kind == Impurity::gini ? "gini" : "entropy";
}

Impurity impurity_from_name(const std::string& name) {
    if (name == "gini") return Impurity::gini;
    if (name == "entropy") return Impurity::entropy;
    throw std::runtime_error("model file: unknown impurity '" + name + "'");
}

void write_tree_block(std::ostream& os, const DecisionTreeModel& model, int tree_index) {
    os << "tree " << tree_index << " nodes " << model.nodes.size() << " max_depth "
       << model.hyper.max_depth << " min_samples_split " << model.hyper.min_samples_split
       << " impurity " << impurity_name(model.hyper.impurity) << "\n";
    os.precision(17);
    for (std::size_t i = 0; i < model.nodes.size(); ++i) {
        const TreeNode& node = model.nodes[i];
        if (node.is_leaf()) {
            os << "node " << i << " leaf " << node.predicted;
            for (int c : node.class_counts) os << ' ' << c;
            os << "\n";
        } else {
            os << "node " << i << " split " << node.feature << ' ' << node.threshold << ' '
               << node.left << ' ' << node.right;
            for (int c : node.class_counts) os << ' ' << c;
            os << "\n";
        }
    }
}

DecisionTreeModel read_tree_block(std::istream& is, int n_classes, int n_features) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("model file: missing tree header");
    std::istringstream header(line);
    std::string word;
    int tree_index = 0;
    std::size_t n_nodes = 0;
    DecisionTreeModel model;
    model.n_classes = n_classes;
    model.n_features = n_features;
    std::string impurity_word;
    if (!(header >> word >> tree_index) || word != "tree")
        throw std::runtime_error("model file: bad tree header: " + line);
    while (header >> word) {
        if (word == "nodes") header >> n_nodes;
        else if (word == "max_depth") header >> model.hyper.max_depth;
        else if (word == "min_samples_split") header >> model.hyper.min_samples_split;
        else if (word == "impurity") header >> impurity_word;
        else throw std::runtime_error("model file: unknown tree field '" + word + "'");
    }
    if (!impurity_word.empty()) model.hyper.impurity = impurity_from_name(impurity_word);
    model.nodes.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (!std::getline(is, line)) throw std::runtime_error("model file: truncated node list");
        std::istringstream ns(line);
        std::size_t id = 0;
        std::string kind;
        if (!(ns >> word >> id >> kind) || word != "node" || id != i) {
            throw std::runtime_error("model file: bad node line: " + line);
        }
        TreeNode& node = model.nodes[i];
        node.class_counts.assign(static_cast<std::size_t>(n_classes), 0);
        if (kind == "leaf") {
            if (!(ns >> node.predicted)) throw std::runtime_error("model file: bad leaf: " + line);
            for (int& c : node.class_counts) {
                if (!(ns >> c)) throw std::runtime_error("model file: bad leaf counts: " + line);
            }
        } else if (kind == "split") {
            if (!(ns >> node.feature >> node.threshold >> node.left >> node.right)) {
                throw std::runtime_error("model file: bad split: " + line);
            }
            for (int& c : node.class_counts) {
                if (!(ns >> c)) throw std::runtime_error("model file: bad split counts: " + line);
            }
            node.predicted = argmax_count(node.class_counts);
            if (node.feature < 0 || node.feature >= n_features || node.left < 0 ||
                node.right < 0 || static_cast<std::size_t>(node.left) >= n_nodes ||
                static_cast<std::size_t>(node.right) >= n_nodes) {
                throw std::runtime_error("model file: node references out of range: " + line);
            }
        } else {
            throw std::runtime_error("model file: unknown node kind '" + kind + "'");
        }
    }
    if (model.nodes.empty()) throw std::runtime_error("model file: tree with no nodes");
    return model;
}

void write_header(std::ostream& os, const char* kind, int n_classes, int n_features) {
    os << kMagic << ' ' << kVersion << "\n"
       << "kind " << kind << "\n"
       << "classes " << n_classes << "\n"
       << "features " << n_features << "\n";
}

}  // namespace

void write_model(std::ostream& os, const DecisionTreeModel& model) {
    write_header(os, "tree", model.n_classes, model.n_features);
    write_tree_block(os, model, 0);
}

void write_model(std::ostream& os, const RandomForestModel& model) {
    write_header(os, "forest", model.n_classes, model.n_features);
    os << "trees " << model.trees.size() << " feature_subset " << model.hyper.feature_subset_size
       << " bootstrap_size " << model.hyper.bootstrap_size << " bootstrap "
       << (model.hyper.bootstrap ? 1 : 0) << " seed " << model.hyper.seed << "\n";
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        write_tree_block(os, model.trees[t], static_cast<int>(t));
    }
}

AnyModel read_model(std::istream& is) {
    std::string magic, version;
    if (!(is >> magic >> version) || magic != kMagic || version != kVersion) {
        throw std::runtime_error("model file: bad header (expected 'respilab-model v1')");
    }
    std::string word, kind;
    int n_classes = 0, n_features = 0;
    if (!(is >> word >> kind) || word != "kind") throw std::runtime_error("model file: missing kind");
    if (!(is >> word >> n_classes) || word != "classes" || n_classes < 1) {
        throw std::runtime_error("model file: missing classes");
    }
    if (!(is >> word >> n_features) || word != "features" || n_features < 1) {
        throw std::runtime_error("model file: missing features");
    }
    is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');

    if (kind == "tree") {
        return AnyModel{read_tree_block(is, n_classes, n_features)};
    }
    if (kind != "forest") throw std::runtime_error("model file: unknown kind '" + kind + "'");

    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("model file: missing forest header");
    std::istringstream fs(line);
    RandomForestModel forest;
    forest.n_classes = n_classes;
    forest.n_features = n_features;
    std::size_t n_trees = 0;
    while (fs >> word) {
        if (word == "trees") fs >> n_trees;
        else if (word == "feature_subset") fs >> forest.hyper.feature_subset_size;
        else if (word == "bootstrap_size") fs >> forest.hyper.bootstrap_size;
        else if (word == "bootstrap") {
            int flag = 1;
            fs >> flag;
            forest.hyper.bootstrap = flag != 0;
        } else if (word == "seed") fs >> forest.hyper.seed;
        else throw std::runtime_error("model file: unknown forest field '" + word + "'");
    }
    if (n_trees == 0) throw std::runtime_error("model file: forest with no trees");
    forest.hyper.n_trees = static_cast<int>(n_trees);
    for (std::size_t t = 0; t < n_trees; ++t) {
        forest.trees.push_back(read_tree_block(is, n_classes, n_features));
    }
    return AnyModel{std::move(forest)};
}

}  // namespace respilab::ml
