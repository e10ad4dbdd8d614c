#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "respilab/config.hpp"

namespace respilab::cli {

struct CommonOptions {
    std::string config_path;                // empty: built-in defaults
    std::optional<std::uint64_t> seed;      // overrides the config seed
    std::optional<std::string> distances;   // overrides the distance set, e.g. "near,mid"
};

config::ExperimentConfig resolve_config(const CommonOptions& opts);

// Writes the data CSV, the row-aligned timestamp file and one noise CSV
// per configured distance ("<stem>_noise_<tag>.csv" next to the data file
// unless a prefix is given).
void cmd_synth(const config::ExperimentConfig& cfg, const std::filesystem::path& out_data,
               std::filesystem::path out_timestamps = {}, std::filesystem::path noise_prefix = {});

// Extracts feature rows for every data row. One noise file selects the
// per-distance reference; several are averaged in the RMS domain.
void cmd_features(const config::ExperimentConfig& cfg, const std::filesystem::path& data_csv,
                  const std::vector<std::string>& noise_specs,  // "tag=path"
                  const std::filesystem::path& out_csv);

// Fits on the training split and saves the model; prints the split
// accuracies. kind is "tree" or "forest".
void cmd_train(const config::ExperimentConfig& cfg, const std::filesystem::path& features_csv,
               const std::string& kind, const std::filesystem::path& model_out);

// Scores a saved model on a feature file; prints accuracy and the
// confusion matrix (optionally written as CSV).
void cmd_evaluate(const config::ExperimentConfig& cfg, const std::filesystem::path& model_path,
                  const std::filesystem::path& features_csv,
                  std::filesystem::path confusion_out = {});

// Hyperparameter sweep (tree depth or forest size, 1..25) on the
// train/validation split; writes the curve and prints the chosen value.
void cmd_sweep(const config::ExperimentConfig& cfg, const std::filesystem::path& features_csv,
               const std::string& kind, const std::filesystem::path& out_csv);

// K-fold cross-validation on the train+validation pool plus a final score
// on the untouched test split.
void cmd_cv(const config::ExperimentConfig& cfg, const std::filesystem::path& features_csv,
            const std::string& kind);

// Full protocol: synthesizes the configured dataset once, then runs every
// distance-set row (singles, consecutive pairs, all) for both models.
// Emits accuracy tables, sweep curves and confusion matrices under out_dir.
void cmd_reproduce(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace respilab::cli
