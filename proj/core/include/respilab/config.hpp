#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "respilab/eval.hpp"
#include "respilab/features.hpp"
#include "respilab/ml.hpp"
#include "respilab/synth.hpp"

namespace respilab::config {

enum class SnrReference {
    automatic,     // per-distance for one distance, averaged otherwise
    per_distance,
    averaged,
};

/// Everything one experiment needs: generation, conditioning, feature,
/// model and evaluation parameters. Seeds are explicit; nothing reads the
/// wall clock.
struct ExperimentConfig {
    std::uint64_t seed = 42;

    synth::RecordParams record{};        // sin^6, 60 s at 100 Hz, offset 0
    synth::ChannelParams channel{};      // distance filled in per tag
    synth::SensorParams sensor{};
    int records_per_class = 50;

    std::vector<synth::DistanceTag> distances = {
        synth::DistanceTag::near, synth::DistanceTag::mid, synth::DistanceTag::far};
    std::map<synth::DistanceTag, double> distance_m = {
        {synth::DistanceTag::near, 0.5},
        {synth::DistanceTag::mid, 1.0},
        {synth::DistanceTag::far, 1.5}};
    // Calibrated noise levels per distance.
    std::map<synth::DistanceTag, synth::NoisePreset> noise = {
        {synth::DistanceTag::near, {6e-4, 5e-3}},
        {synth::DistanceTag::mid, {2e-3, 1e-2}},
        {synth::DistanceTag::far, {8e-3, 2e-2}}};

    features::ExtractParams extract{};   // MA 50, detrend order 5, ESA 20% over 100 bins

    ml::TreeHyperparams tree{10, 2, ml::Impurity::gini};  // tuned depth
    ml::ForestHyperparams forest{};                       // tuned size, k = floor(sqrt(4))
    int forest_tree_max_depth = 0;                        // 0 = unlimited

    int cv_folds = 10;
    bool stratified = true;
    SnrReference snr_reference = SnrReference::automatic;
};

ExperimentConfig default_config();

// Flat key-value config file ("key = value", '#' comments). Unknown keys
// and malformed values raise std::runtime_error naming the line.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& is, const std::string& origin = "config");

// Writes every key with its current value; load(write(cfg)) == cfg.
void write_config(std::ostream& os, const ExperimentConfig& cfg);

// Generation plan for a subset of the configured distances (empty subset
// means all configured distances, in configured order).
synth::DatasetSpec make_dataset_spec(const ExperimentConfig& cfg,
                                     std::vector<synth::DistanceTag> subset = {});

// Tree hyperparameters the forest's members grow with.
ml::TreeHyperparams forest_tree_hyper(const ExperimentConfig& cfg);

// Resolved SNR mode for a given number of distances.
bool use_averaged_reference(const ExperimentConfig& cfg, std::size_t n_distances);

}  // namespace respilab::config
