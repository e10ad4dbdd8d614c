#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "respilab/eval.hpp"
#include "respilab/features.hpp"
#include "respilab/ml.hpp"
#include "respilab/synth.hpp"

namespace respilab::io {

// Numeric CSV precision: 9 significant digits, locale-independent.
std::string format_sig9(double v);

/// One parsed row of the data CSV.
struct DataRow {
    std::vector<double> samples;
    int label = 0;
};

// Data CSV: one record per row, every sample then one integer label.
void write_data_csv(const std::filesystem::path& path,
                    std::span<const synth::SensedRecord> records);
std::vector<DataRow> read_data_csv(const std::filesystem::path& path);

// Timestamp file: row-aligned with the data CSV, seconds offsets.
void write_timestamps_csv(const std::filesystem::path& path,
                          std::span<const synth::SensedRecord> records);

// Noise record: a single unlabeled row of samples.
void write_noise_csv(const std::filesystem::path& path, std::span<const double> samples);
std::vector<double> read_noise_csv(const std::filesystem::path& path);

// Feature CSV: 4 feature columns + integer label per row.
void write_features_csv(const std::filesystem::path& path,
                        std::span<const features::FeatureVector> rows);
std::vector<features::FeatureVector> read_features_csv(const std::filesystem::path& path);

// Model files (plain-text format from ml).
void save_model(const std::filesystem::path& path, const ml::DecisionTreeModel& model);
void save_model(const std::filesystem::path& path, const ml::RandomForestModel& model);
ml::AnyModel load_model(const std::filesystem::path& path);

/// One row of an accuracy report table.
struct ReportRow {
    std::string distances;  // e.g. "0.5m" or "0.5m+1m"
    eval::EvalReport report;
};

// Accuracy table with the columns distances, training/validation/test
// accuracy and CV training/test accuracy.
void write_report_csv(const std::filesystem::path& path, std::span<const ReportRow> rows);

// Sweep curve: hyperparameter value, train accuracy, validation accuracy.
void write_sweep_csv(const std::filesystem::path& path, const eval::SweepCurve& curve);

// Confusion matrix as bare integer rows.
void write_confusion_csv(const std::filesystem::path& path,
                         const std::vector<std::vector<int>>& counts);

}  // namespace respilab::io
