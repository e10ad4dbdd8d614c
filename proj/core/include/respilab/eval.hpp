#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "respilab/ml.hpp"

namespace respilab::eval {

struct SplitFractions {
    double train = 0.6;
    double validation = 0.2;
    double test = 0.2;
};

struct DatasetSplit {
    std::vector<int> train;
    std::vector<int> validation;
    std::vector<int> test;
    std::uint64_t seed = 0;
};

// Random train/validation/test split, stratified per class by default so
// small runs keep every class represented. Throws when a class has fewer
// than 5 records (stratified mode) or the dataset is empty.
DatasetSplit stratified_split(std::span<const int> labels, std::uint64_t seed,
                              SplitFractions fractions = {}, bool stratified = true);

// Fraction of matching predictions. Throws on empty or mismatched input.
double accuracy(std::span<const int> predictions, std::span<const int> labels);

// counts[i][j] = records with true label i predicted j.
// Throws when a label falls outside [0, n_classes).
std::vector<std::vector<int>> confusion_matrix(std::span<const int> predictions,
                                               std::span<const int> labels,
                                               int n_classes = 8);

/// A fitted classifier as a callable.
using Predictor = std::function<int(std::span<const double>)>;

/// Model family: trains on a dataset with a given seed.
using ModelFactory = std::function<Predictor(const ml::Dataset&, std::uint64_t)>;

// Families used throughout the evaluation protocol.
ModelFactory tree_factory(ml::TreeHyperparams hyper);
ModelFactory forest_factory(ml::ForestHyperparams fh, ml::TreeHyperparams th);

struct SweepPoint {
    int value = 0;
    double train_accuracy = 0.0;
    double validation_accuracy = 0.0;
};

struct SweepCurve {
    std::vector<SweepPoint> points;
    int chosen = 0;  // saturation rule: smallest value within tolerance of the best
};

// Fits one model per grid value on the train set and scores train and
// validation accuracy. The chosen hyperparameter is the smallest grid
// value whose validation accuracy is within saturation_tol of the
// curve's maximum.
SweepCurve sweep(const ml::Dataset& data, const DatasetSplit& split, std::span<const int> grid,
                 const std::function<ModelFactory(int)>& family, std::uint64_t seed,
                 double saturation_tol = 0.01);

struct CvResult {
    double mean_train_accuracy = 0.0;
    double mean_test_accuracy = 0.0;
    std::vector<double> fold_train;
    std::vector<double> fold_test;
};

// K-fold cross-validation over the pool (stratified folds by default).
// Throws when k exceeds the pool size or k < 2.
CvResult kfold_cv(const ml::Dataset& pool, const ModelFactory& factory, int k,
                  std::uint64_t seed, bool stratified = true);

struct EvalReport {
    double train_accuracy = 0.0;
    double validation_accuracy = 0.0;
    double test_accuracy = 0.0;
    double cv_train_accuracy = 0.0;
    double cv_test_accuracy = 0.0;
    std::vector<std::vector<int>> confusion;  // on the held-out test set
};

// Full protocol for one dataset and one model family: split, fit on the
// train set (train/validation/test accuracies + confusion), then K-fold
// CV on the train+validation pool. The test indices never reach a fit.
EvalReport run_protocol(const ml::Dataset& data, const ModelFactory& factory,
                        std::uint64_t split_seed, std::uint64_t fit_seed, int cv_folds,
                        bool stratified = true);

}  // namespace respilab::eval
