#include "respilab/eval.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace respilab::eval {

namespace {

std::vector<std::vector<int>> indices_by_class(std::span<const int> labels) {
    int n_classes = 0;
    for (int label : labels) n_classes = std::max(n_classes, label + 1);
    std::vector<std::vector<int>> bins(static_cast<std::size_t>(n_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0) throw std::invalid_argument("labels must be non-negative");
        bins[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
    }
    return bins;
}

}  // namespace

DatasetSplit stratified_split(std::span<const int> labels, std::uint64_t seed,
                              SplitFractions fractions, bool stratified) {
    if (labels.empty()) throw std::invalid_argument("stratified_split: empty dataset");
    const double sum = fractions.train + fractions.validation + fractions.test;
    if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("stratified_split: fractions must sum to 1");
    }

    DatasetSplit split;
    split.seed = seed;

    auto deal = [&](std::vector<int>& group, std::uint64_t stream) {
        Rng rng(mix_seed(seed, stream));
        std::shuffle(group.begin(), group.end(), rng);
        const auto n = static_cast<long>(group.size());
        const long n_train = std::lround(fractions.train * static_cast<double>(n));
        const long n_val = std::lround(fractions.validation * static_cast<double>(n));
        for (long i = 0; i < n; ++i) {
            if (i < n_train) split.train.push_back(group[static_cast<std::size_t>(i)]);
            else if (i < n_train + n_val) split.validation.push_back(group[static_cast<std::size_t>(i)]);
            else split.test.push_back(group[static_cast<std::size_t>(i)]);
        }
    };

    if (stratified) {
        auto bins = indices_by_class(labels);
        for (std::size_t c = 0; c < bins.size(); ++c) {
            if (bins[c].empty()) continue;
            if (bins[c].size() < 5) {
                throw std::invalid_argument("stratified_split: class " + std::to_string(c) +
                                            " has fewer than 5 records");
            }
            deal(bins[c], c);
        }
    } else {
        std::vector<int> all(labels.size());
        std::iota(all.begin(), all.end(), 0);
        deal(all, 0);
    }
    return split;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.empty() || predictions.size() != labels.size()) {
        throw std::invalid_argument("accuracy: empty or mismatched inputs");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i] == labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

std::vector<std::vector<int>> confusion_matrix(std::span<const int> predictions,
                                               std::span<const int> labels, int n_classes) {
    if (predictions.size() != labels.size()) {
        throw std::invalid_argument("confusion_matrix: mismatched inputs");
    }
    std::vector<std::vector<int>> counts(static_cast<std::size_t>(n_classes),
                                         std::vector<int>(static_cast<std::size_t>(n_classes), 0));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= n_classes || predictions[i] < 0 ||
            predictions[i] >= n_classes) {
            throw std::invalid_argument("confusion_matrix: label out of range");
        }
        ++counts[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(predictions[i])];
    }
    return counts;
}

ModelFactory tree_factory(ml::TreeHyperparams hyper) {
    return [hyper](const ml::Dataset& train, std::uint64_t) -> Predictor {
        auto model = std::make_shared<ml::DecisionTreeModel>(ml::fit_tree(train, hyper));
        return [model](std::span<const double> x) { return model->predict(x); };
    };
}

ModelFactory forest_factory(ml::ForestHyperparams fh, ml::TreeHyperparams th) {
    return [fh, th](const ml::Dataset& train, std::uint64_t seed) -> Predictor {
        ml::ForestHyperparams seeded = fh;
        seeded.seed = seed;
        auto model = std::make_shared<ml::RandomForestModel>(ml::fit_forest(train, seeded, th));
        return [model](std::span<const double> x) { return model->predict(x); };
    };
}

namespace {

std::vector<int> predict_all(const Predictor& predict, const ml::Dataset& data,
                             std::span<const int> indices) {
    std::vector<int> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(predict(data.x[static_cast<std::size_t>(i)]));
    return out;
}

std::vector<int> labels_at(const ml::Dataset& data, std::span<const int> indices) {
    std::vector<int> out;
    out.reserve(indices.size());
    for (int i : indices) out.push_back(data.y[static_cast<std::size_t>(i)]);
    return out;
}

}  // namespace

SweepCurve sweep(const ml::Dataset& data, const DatasetSplit& split, std::span<const int> grid,
                 const std::function<ModelFactory(int)>& family, std::uint64_t seed,
                 double saturation_tol) {
    if (grid.empty()) throw std::invalid_argument("sweep: empty grid");
    SweepCurve curve;
    const ml::Dataset train = data.subset(split.train);
    const auto val_labels = labels_at(data, split.validation);

    for (std::size_t g = 0; g < grid.size(); ++g) {
        const int value = grid[g];
        const Predictor model = family(value)(train, mix_seed(seed, g));
        SweepPoint point;
        point.value = value;
        std::vector<int> train_pred;
        train_pred.reserve(train.size());
        for (const auto& row : train.x) train_pred.push_back(model(row));
        point.train_accuracy = accuracy(train_pred, train.y);
        point.validation_accuracy = accuracy(predict_all(model, data, split.validation), val_labels);
        curve.points.push_back(point);
    }

    double best = 0.0;
    for (const auto& p : curve.points) best = std::max(best, p.validation_accuracy);
    curve.chosen = curve.points.front().value;
    for (const auto& p : curve.points) {
        if (p.validation_accuracy >= best - saturation_tol) {
            curve.chosen = p.value;
            break;
        }
    }
    return curve;
}

CvResult kfold_cv(const ml::Dataset& pool, const ModelFactory& factory, int k, std::uint64_t seed,
                  bool stratified) {
    if (k < 2) throw std::invalid_argument("kfold_cv: k must be >= 2");
    if (static_cast<std::size_t>(k) > pool.size()) {
        throw std::invalid_argument("kfold_cv: k exceeds pool size");
    }

    // Deal shuffled indices round-robin into k folds.
    std::vector<std::vector<int>> folds(static_cast<std::size_t>(k));
    if (stratified) {
        auto bins = indices_by_class(pool.y);
        std::size_t next = 0;
        for (std::size_t c = 0; c < bins.size(); ++c) {
            Rng rng(mix_seed(seed, 0x6f6c64, c));
            std::shuffle(bins[c].begin(), bins[c].end(), rng);
            for (int idx : bins[c]) {
                folds[next % static_cast<std::size_t>(k)].push_back(idx);
                ++next;
            }
        }
    } else {
        std::vector<int> all(pool.size());
        std::iota(all.begin(), all.end(), 0);
        Rng rng(mix_seed(seed, 0x6f6c64));
        std::shuffle(all.begin(), all.end(), rng);
        for (std::size_t i = 0; i < all.size(); ++i) {
            folds[i % static_cast<std::size_t>(k)].push_back(all[i]);
        }
    }

    CvResult result;
    for (int f = 0; f < k; ++f) {
        std::vector<int> train_idx;
        for (int g = 0; g < k; ++g) {
            if (g == f) continue;
            train_idx.insert(train_idx.end(), folds[static_cast<std::size_t>(g)].begin(),
                             folds[static_cast<std::size_t>(g)].end());
        }
        const auto& test_idx = folds[static_cast<std::size_t>(f)];
        const ml::Dataset train = pool.subset(train_idx);
        const Predictor model = factory(train, mix_seed(seed, static_cast<std::uint64_t>(f)));

        std::vector<int> train_pred;
        train_pred.reserve(train.size());
        for (const auto& row : train.x) train_pred.push_back(model(row));
        result.fold_train.push_back(accuracy(train_pred, train.y));
        result.fold_test.push_back(
            accuracy(predict_all(model, pool, test_idx), labels_at(pool, test_idx)));
    }
    result.mean_train_accuracy =
        std::accumulate(result.fold_train.begin(), result.fold_train.end(), 0.0) /
        static_cast<double>(k);
    result.mean_test_accuracy =
        std::accumulate(result.fold_test.begin(), result.fold_test.end(), 0.0) /
        static_cast<double>(k);
    return result;
}

EvalReport run_protocol(const ml::Dataset& data, const ModelFactory& factory,
                        std::uint64_t split_seed, std::uint64_t fit_seed, int cv_folds,
                        bool stratified) {
    const DatasetSplit split = stratified_split(data.y, split_seed, {}, stratified);

    // The test set must stay untouched by fitting and tuning.
    std::unordered_set<int> seen(split.train.begin(), split.train.end());
    seen.insert(split.validation.begin(), split.validation.end());
    for (int i : split.test) {
        if (seen.count(i) != 0) throw std::logic_error("run_protocol: split indices overlap");
    }

    EvalReport report;
    const ml::Dataset train = data.subset(split.train);
    const Predictor model = factory(train, fit_seed);

    std::vector<int> train_pred;
    train_pred.reserve(train.size());
    for (const auto& row : train.x) train_pred.push_back(model(row));
    report.train_accuracy = accuracy(train_pred, train.y);

    const auto val_pred = predict_all(model, data, split.validation);
    report.validation_accuracy = accuracy(val_pred, labels_at(data, split.validation));

    const auto test_pred = predict_all(model, data, split.test);
    const auto test_labels = labels_at(data, split.test);
    report.test_accuracy = accuracy(test_pred, test_labels);
    report.confusion = confusion_matrix(test_pred, test_labels,
                                        std::max(data.n_classes(), 8));

    std::vector<int> pool_idx = split.train;
    pool_idx.insert(pool_idx.end(), split.validation.begin(), split.validation.end());
    const ml::Dataset pool = data.subset(pool_idx);
    const CvResult cv = kfold_cv(pool, factory, cv_folds, mix_seed(split_seed, 0xcf), stratified);
    report.cv_train_accuracy = cv.mean_train_accuracy;
    report.cv_test_accuracy = cv.mean_test_accuracy;
    return report;
}

}  // namespace respilab::eval
