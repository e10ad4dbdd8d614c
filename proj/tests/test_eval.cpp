#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "respilab/eval.hpp"
#include "respilab/ml.hpp"

using namespace respilab;

namespace {

std::vector<int> balanced_labels(int per_class, int n_classes) {
    std::vector<int> labels;
    for (int c = 0; c < n_classes; ++c) {
        labels.insert(labels.end(), static_cast<std::size_t>(per_class), c);
    }
    return labels;
}

ml::Dataset separable_dataset(int per_class, int n_classes, std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    ml::Dataset data;
    for (int c = 0; c < n_classes; ++c) {
        for (int i = 0; i < per_class; ++i) {
            data.add({static_cast<double>(c) + jitter(rng), jitter(rng), jitter(rng), jitter(rng)},
                     c);
        }
    }
    return data;
}

// Majority-class baseline: predicts the most frequent training label.
eval::ModelFactory majority_baseline() {
    return [](const ml::Dataset& train, std::uint64_t) -> eval::Predictor {
        std::vector<int> counts(static_cast<std::size_t>(train.n_classes()), 0);
        for (int label : train.y) ++counts[static_cast<std::size_t>(label)];
        const int winner = static_cast<int>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        return [winner](std::span<const double>) { return winner; };
    };
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("split sizes follow the 60/20/20 protocol") {
    const auto labels400 = balanced_labels(50, 8);
    const auto split400 = eval::stratified_split(labels400, 1);
    CHECK(split400.train.size() == 240);
    CHECK(split400.validation.size() == 80);
    CHECK(split400.test.size() == 80);

    const auto labels1200 = balanced_labels(150, 8);
    const auto split1200 = eval::stratified_split(labels1200, 1);
    CHECK(split1200.train.size() == 720);
    CHECK(split1200.validation.size() == 240);
    CHECK(split1200.test.size() == 240);
}

TEST_CASE("splits are deterministic, disjoint and exhaustive") {
    const auto labels = balanced_labels(30, 8);
    const auto a = eval::stratified_split(labels, 99);
    const auto b = eval::stratified_split(labels, 99);
    CHECK(a.train == b.train);
    CHECK(a.validation == b.validation);
    CHECK(a.test == b.test);

    std::set<int> seen;
    for (const auto* group : {&a.train, &a.validation, &a.test}) {
        for (int i : *group) {
            CHECK(seen.insert(i).second);  // no index appears twice
        }
    }
    CHECK(seen.size() == labels.size());

    const auto c = eval::stratified_split(labels, 100);
    CHECK(a.train != c.train);
}

TEST_CASE("stratified splits keep per-class proportions within one record") {
    const auto labels = balanced_labels(29, 8);  // awkward size: 17.4 / 5.8 / 5.8
    const auto split = eval::stratified_split(labels, 5);
    std::vector<int> train_per_class(8, 0);
    for (int i : split.train) ++train_per_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
    for (int count : train_per_class) {
        CHECK(std::abs(count - 17) <= 1);
    }
}

TEST_CASE("classes below five records are rejected in stratified mode") {
    std::vector<int> labels = balanced_labels(6, 2);
    labels.push_back(2);  // class 2 has a single record
    CHECK_THROWS_AS(eval::stratified_split(labels, 1), std::invalid_argument);
    CHECK_NOTHROW(eval::stratified_split(labels, 1, {}, /*stratified=*/false));
}

TEST_CASE("accuracy arithmetic and edge cases") {
    const std::vector<int> truth = {1, 2, 3, 4};
    CHECK(eval::accuracy(truth, truth) == 1.0);
    CHECK(eval::accuracy(std::vector<int>{0, 0, 0, 0}, truth) == 0.0);
    CHECK(eval::accuracy(std::vector<int>{1, 2, 3, 0}, truth) == 0.75);
    CHECK_THROWS_AS(eval::accuracy(std::vector<int>{}, std::vector<int>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(eval::accuracy(std::vector<int>{1}, truth), std::invalid_argument);
}

TEST_CASE("confusion matrix counts and validation") {
    const std::vector<int> truth = {0, 1, 2, 3, 3};
    const std::vector<int> pred = {0, 1, 2, 5, 3};
    const auto m = eval::confusion_matrix(pred, truth, 8);
    CHECK(m[0][0] == 1);
    CHECK(m[3][5] == 1);
    CHECK(m[3][3] == 1);

    // Row sums equal per-class truth counts.
    std::vector<int> per_class(8, 0);
    for (int t : truth) ++per_class[static_cast<std::size_t>(t)];
    for (int c = 0; c < 8; ++c) {
        const int row_sum = std::accumulate(m[static_cast<std::size_t>(c)].begin(),
                                            m[static_cast<std::size_t>(c)].end(), 0);
        CHECK(row_sum == per_class[static_cast<std::size_t>(c)]);
    }

    CHECK_THROWS_AS(eval::confusion_matrix(std::vector<int>{9}, std::vector<int>{0}, 8),
                    std::invalid_argument);
}

TEST_CASE("perfect predictions give a diagonal confusion matrix") {
    const std::vector<int> truth = {0, 1, 2, 3, 4, 5, 6, 7, 7};
    const auto m = eval::confusion_matrix(truth, truth, 8);
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            if (i != j) CHECK(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] == 0);
        }
    }
}

TEST_CASE("training accuracy never drops with deeper trees") {
    const auto data = separable_dataset(20, 8, 3);
    const auto split = eval::stratified_split(data.y, 4);
    std::vector<int> grid(12);
    std::iota(grid.begin(), grid.end(), 1);

    const auto curve = eval::sweep(data, split, grid,
                                   [](int depth) {
                                       return eval::tree_factory({depth, 2, ml::Impurity::gini});
                                   },
                                   17);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        CHECK(curve.points[i].train_accuracy >= curve.points[i - 1].train_accuracy - 1e-12);
    }
}

TEST_CASE("the saturation rule picks the smallest near-best value") {
    const auto data = separable_dataset(20, 8, 5);
    const auto split = eval::stratified_split(data.y, 6);
    const std::vector<int> grid = {1, 2, 3, 4, 5, 6, 7, 8};
    const auto curve = eval::sweep(data, split, grid,
                                   [](int depth) {
                                       return eval::tree_factory({depth, 2, ml::Impurity::gini});
                                   },
                                   18);
    double best = 0.0;
    for (const auto& p : curve.points) best = std::max(best, p.validation_accuracy);
    // chosen is the first grid value within a percentage point of the best
    for (const auto& p : curve.points) {
        if (p.value < curve.chosen) CHECK(p.validation_accuracy < best - 0.01);
        if (p.value == curve.chosen) CHECK(p.validation_accuracy >= best - 0.01);
    }
}

TEST_CASE("a one-point grid is chosen outright") {
    const auto data = separable_dataset(10, 4, 7);
    const auto split = eval::stratified_split(data.y, 8);
    const std::vector<int> grid = {3};
    const auto curve = eval::sweep(data, split, grid,
                                   [](int depth) {
                                       return eval::tree_factory({depth, 2, ml::Impurity::gini});
                                   },
                                   19);
    CHECK(curve.chosen == 3);
    CHECK(curve.points.size() == 1);
}

TEST_CASE("a memorizing tree shows perfect CV training accuracy") {
    const auto data = separable_dataset(10, 4, 9);
    const auto cv = eval::kfold_cv(data, eval::tree_factory({}), 10, 21);
    CHECK(cv.mean_train_accuracy == 1.0);
    CHECK(cv.fold_train.size() == 10);
    CHECK(cv.fold_test.size() == 10);
    CHECK(cv.mean_test_accuracy > 0.9);  // clusters are cleanly separable
}

TEST_CASE("leave-one-out is the k = pool-size boundary") {
    const auto data = separable_dataset(3, 4, 11);  // 12 records
    const auto cv = eval::kfold_cv(data, eval::tree_factory({}), 12, 22);
    CHECK(cv.fold_test.size() == 12);
    for (double acc : cv.fold_test) {
        CHECK((acc == 0.0 || acc == 1.0));  // single-record folds
    }
    CHECK_THROWS_AS(eval::kfold_cv(data, eval::tree_factory({}), 13, 22),
                    std::invalid_argument);
    CHECK_THROWS_AS(eval::kfold_cv(data, eval::tree_factory({}), 1, 22), std::invalid_argument);
}

TEST_CASE("the majority baseline lands at chance on a balanced pool") {
    ml::Dataset data;
    Rng rng(31);
    std::uniform_real_distribution<double> value(-1.0, 1.0);
    for (int c = 0; c < 8; ++c) {
        for (int i = 0; i < 40; ++i) {
            data.add({value(rng), value(rng), value(rng), value(rng)}, c);
        }
    }
    const auto cv = eval::kfold_cv(data, majority_baseline(), 10, 33);
    CHECK(std::abs(cv.mean_test_accuracy - 0.125) <= 0.02);  // chance level for 8 classes
}

TEST_CASE("the full protocol keeps the test set out of fitting and tuning") {
    const auto data = separable_dataset(15, 8, 41);
    const auto report = eval::run_protocol(data, eval::tree_factory({}), 51, 52, 10);
    CHECK(report.train_accuracy == 1.0);
    CHECK(report.test_accuracy > 0.8);
    CHECK(report.cv_test_accuracy > 0.8);
    REQUIRE(report.confusion.size() == 8);

    // Confusion rows cover exactly the test records.
    int total = 0;
    for (const auto& row : report.confusion) {
        total += std::accumulate(row.begin(), row.end(), 0);
    }
    CHECK(total == 24);  // 20% of 120
}

}  // TEST_SUITE
