#include "respilab/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace respilab::config {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& value) {
    double out = 0.0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) throw std::runtime_error("not a number: '" + value + "'");
    return out;
}

long to_long(const std::string& value) {
    long out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) throw std::runtime_error("not an integer: '" + value + "'");
    return out;
}

std::uint64_t to_u64(const std::string& value) {
    std::uint64_t out = 0;
    const char* begin = value.data();
    const char* end = begin + value.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc{} || ptr != end) {
        throw std::runtime_error("not an unsigned integer: '" + value + "'");
    }
    return out;
}

bool to_bool(const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw std::runtime_error("expected true or false, got '" + value + "'");
}

std::vector<synth::DistanceTag> to_distances(const std::string& value) {
    std::vector<synth::DistanceTag> tags;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        tags.push_back(synth::distance_tag_from_string(trim(item)));
    }
    if (tags.empty()) throw std::runtime_error("empty distance list");
    return tags;
}

std::string full_precision(double v) {
    char buf[40];
    const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf, static_cast<std::size_t>(len));
}

SnrReference snr_reference_from_string(const std::string& value) {
    if (value == "auto") return SnrReference::automatic;
    if (value == "per_distance") return SnrReference::per_distance;
    if (value == "averaged") return SnrReference::averaged;
    throw std::runtime_error("expected auto, per_distance or averaged, got '" + value + "'");
}

const char* snr_reference_name(SnrReference ref) {
    switch (ref) {
        case SnrReference::automatic: return "auto";
        case SnrReference::per_distance: return "per_distance";
        case SnrReference::averaged: return "averaged";
    }
    return "auto";
}

// Depth 0 in the file means "unlimited".
int depth_from_file(long v) {
    if (v < 0) throw std::runtime_error("depth must be >= 0");
    return v == 0 ? ml::kUnlimitedDepth : static_cast<int>(v);
}

long depth_to_file(int v) { return v == ml::kUnlimitedDepth ? 0 : v; }

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& key_table() {
    using C = ExperimentConfig;
    static const std::map<std::string, Setter> table = {
        {"seed", [](C& c, const std::string& v) { c.seed = to_u64(v); }},
        {"records_per_class",
         [](C& c, const std::string& v) { c.records_per_class = static_cast<int>(to_long(v)); }},
        {"distances", [](C& c, const std::string& v) { c.distances = to_distances(v); }},
        {"pattern_exponent",
         [](C& c, const std::string& v) {
             c.record.pattern.exponent = static_cast<int>(to_long(v));
             if (!synth::pattern_supported(c.record.pattern.exponent)) {
                 throw std::runtime_error("pattern exponent must be 1, 2, 4 or 6");
             }
         }},
        {"duration_s", [](C& c, const std::string& v) { c.record.duration_s = to_double(v); }},
        {"sample_rate_hz",
         [](C& c, const std::string& v) { c.record.sample_rate_hz = to_double(v); }},
        {"offset_mm", [](C& c, const std::string& v) { c.record.offset_mm = to_double(v); }},

        {"channel.transmit_power",
         [](C& c, const std::string& v) { c.channel.transmit_power = to_double(v); }},
        {"channel.intercept_area",
         [](C& c, const std::string& v) { c.channel.intercept_area = to_double(v); }},
        {"channel.path_loss_exponent",
         [](C& c, const std::string& v) { c.channel.path_loss_exponent = to_double(v); }},
        {"channel.irradiance_angle_rad",
         [](C& c, const std::string& v) { c.channel.irradiance_angle_rad = to_double(v); }},
        {"channel.incidence_angle_rad",
         [](C& c, const std::string& v) { c.channel.incidence_angle_rad = to_double(v); }},
        {"channel.half_angle_rad",
         [](C& c, const std::string& v) { c.channel.half_angle_rad = to_double(v); }},

        {"sensor.responsivity",
         [](C& c, const std::string& v) { c.sensor.responsivity = to_double(v); }},
        {"sensor.dark_current",
         [](C& c, const std::string& v) { c.sensor.dark_current = to_double(v); }},
        {"sensor.transimpedance_gain",
         [](C& c, const std::string& v) { c.sensor.transimpedance_gain = to_double(v); }},
        {"sensor.lockin_ref_amplitude",
         [](C& c, const std::string& v) { c.sensor.lockin_ref_amplitude = to_double(v); }},
        {"sensor.full_scale",
         [](C& c, const std::string& v) { c.sensor.full_scale = to_double(v); }},
        {"sensor.sensitivity",
         [](C& c, const std::string& v) { c.sensor.sensitivity = to_double(v); }},
        {"sensor.reflect_base",
         [](C& c, const std::string& v) { c.sensor.reflect_base = to_double(v); }},
        {"sensor.reflect_slope_per_mm",
         [](C& c, const std::string& v) { c.sensor.reflect_slope_per_mm = to_double(v); }},

        {"distance.near.meters",
         [](C& c, const std::string& v) { c.distance_m[synth::DistanceTag::near] = to_double(v); }},
        {"distance.mid.meters",
         [](C& c, const std::string& v) { c.distance_m[synth::DistanceTag::mid] = to_double(v); }},
        {"distance.far.meters",
         [](C& c, const std::string& v) { c.distance_m[synth::DistanceTag::far] = to_double(v); }},

        {"noise.near.sigma",
         [](C& c, const std::string& v) { c.noise[synth::DistanceTag::near].sigma = to_double(v); }},
        {"noise.near.drift_amplitude",
         [](C& c, const std::string& v) {
             c.noise[synth::DistanceTag::near].drift_amplitude = to_double(v);
         }},
        {"noise.mid.sigma",
         [](C& c, const std::string& v) { c.noise[synth::DistanceTag::mid].sigma = to_double(v); }},
        {"noise.mid.drift_amplitude",
         [](C& c, const std::string& v) {
             c.noise[synth::DistanceTag::mid].drift_amplitude = to_double(v);
         }},
        {"noise.far.sigma",
         [](C& c, const std::string& v) { c.noise[synth::DistanceTag::far].sigma = to_double(v); }},
        {"noise.far.drift_amplitude",
         [](C& c, const std::string& v) {
             c.noise[synth::DistanceTag::far].drift_amplitude = to_double(v);
         }},

        {"dsp.moving_average_points",
         [](C& c, const std::string& v) {
             c.extract.moving_average_points = static_cast<std::size_t>(to_long(v));
         }},
        {"dsp.detrend_order",
         [](C& c, const std::string& v) { c.extract.detrend_order = static_cast<int>(to_long(v)); }},

        {"features.esa_threshold_pct",
         [](C& c, const std::string& v) { c.extract.esa_threshold_pct = to_double(v); }},
        {"features.esa_bins",
         [](C& c, const std::string& v) { c.extract.esa_bins = static_cast<std::size_t>(to_long(v)); }},
        {"features.rate_bin_min",
         [](C& c, const std::string& v) {
             c.extract.rate_range.lo = static_cast<std::size_t>(to_long(v));
         }},
        {"features.rate_bin_max",
         [](C& c, const std::string& v) {
             c.extract.rate_range.hi = static_cast<std::size_t>(to_long(v));
         }},

        {"tree.max_depth",
         [](C& c, const std::string& v) { c.tree.max_depth = depth_from_file(to_long(v)); }},
        {"tree.min_samples_split",
         [](C& c, const std::string& v) {
             c.tree.min_samples_split = static_cast<int>(to_long(v));
         }},
        {"tree.impurity",
         [](C& c, const std::string& v) {
             if (v == "gini") c.tree.impurity = ml::Impurity::gini;
             else if (v == "entropy") c.tree.impurity = ml::Impurity::entropy;
             else throw std::runtime_error("expected gini or entropy, got '" + v + "'");
         }},

        {"forest.n_trees",
         [](C& c, const std::string& v) { c.forest.n_trees = static_cast<int>(to_long(v)); }},
        {"forest.feature_subset_size",
         [](C& c, const std::string& v) {
             c.forest.feature_subset_size = static_cast<int>(to_long(v));
         }},
        {"forest.bootstrap_size",
         [](C& c, const std::string& v) {
             c.forest.bootstrap_size = static_cast<int>(to_long(v));
         }},
        {"forest.tree_max_depth",
         [](C& c, const std::string& v) {
             c.forest_tree_max_depth = static_cast<int>(to_long(v));
         }},

        {"eval.cv_folds",
         [](C& c, const std::string& v) { c.cv_folds = static_cast<int>(to_long(v)); }},
        {"eval.stratified", [](C& c, const std::string& v) { c.stratified = to_bool(v); }},
        {"eval.snr_reference",
         [](C& c, const std::string& v) { c.snr_reference = snr_reference_from_string(v); }},
    };
    return table;
}

void validate(const ExperimentConfig& cfg) {
    if (cfg.records_per_class < 1) throw std::runtime_error("records_per_class must be >= 1");
    for (synth::DistanceTag tag : cfg.distances) {
        if (cfg.distance_m.find(tag) == cfg.distance_m.end()) {
            throw std::runtime_error("distance '" + synth::to_string(tag) + "' has no meters value");
        }
        if (cfg.noise.find(tag) == cfg.noise.end()) {
            throw std::runtime_error("distance '" + synth::to_string(tag) + "' has no noise preset");
        }
    }
    if (cfg.cv_folds < 2) throw std::runtime_error("eval.cv_folds must be >= 2");
    if (cfg.tree.max_depth < 1) throw std::runtime_error("tree.max_depth must be >= 1 (0 = unlimited)");
    if (cfg.forest.feature_subset_size < 1 ||
        cfg.forest.feature_subset_size >= features::kNumFeatures + 1) {
        throw std::runtime_error("forest.feature_subset_size must lie in [1, 4]");
    }
}

}  // namespace

ExperimentConfig default_config() { return ExperimentConfig{}; }

ExperimentConfig parse_config(std::istream& is, const std::string& origin) {
    ExperimentConfig cfg;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(is, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;

        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(origin + " line " + std::to_string(line_number) +
                                     ": expected 'key = value'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        const auto& table = key_table();
        const auto it = table.find(key);
        if (it == table.end()) {
            throw std::runtime_error(origin + " line " + std::to_string(line_number) +
                                     ": unknown key '" + key + "'");
        }
        try {
            it->second(cfg, value);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error(origin + " line " + std::to_string(line_number) + ": " +
                                     key + ": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error(path.string() + ": cannot open config file");
    return parse_config(is, path.string());
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
    os << "# respilab experiment configuration\n";
    os << "seed = " << cfg.seed << "\n";
    os << "records_per_class = " << cfg.records_per_class << "\n";
    os << "distances = ";
    for (std::size_t i = 0; i < cfg.distances.size(); ++i) {
        if (i != 0) os << ',';
        os << synth::to_string(cfg.distances[i]);
    }
    os << "\n";
    os << "pattern_exponent = " << cfg.record.pattern.exponent << "\n";
    os << "duration_s = " << full_precision(cfg.record.duration_s) << "\n";
    os << "sample_rate_hz = " << full_precision(cfg.record.sample_rate_hz) << "\n";
    os << "offset_mm = " << full_precision(cfg.record.offset_mm) << "\n";

    os << "channel.transmit_power = " << full_precision(cfg.channel.transmit_power) << "\n";
    os << "channel.intercept_area = " << full_precision(cfg.channel.intercept_area) << "\n";
    os << "channel.path_loss_exponent = " << full_precision(cfg.channel.path_loss_exponent) << "\n";
    os << "channel.irradiance_angle_rad = " << full_precision(cfg.channel.irradiance_angle_rad)
       << "\n";
    os << "channel.incidence_angle_rad = " << full_precision(cfg.channel.incidence_angle_rad)
       << "\n";
    os << "channel.half_angle_rad = " << full_precision(cfg.channel.half_angle_rad) << "\n";

    os << "sensor.responsivity = " << full_precision(cfg.sensor.responsivity) << "\n";
    os << "sensor.dark_current = " << full_precision(cfg.sensor.dark_current) << "\n";
    os << "sensor.transimpedance_gain = " << full_precision(cfg.sensor.transimpedance_gain) << "\n";
    os << "sensor.lockin_ref_amplitude = " << full_precision(cfg.sensor.lockin_ref_amplitude)
       << "\n";
    os << "sensor.full_scale = " << full_precision(cfg.sensor.full_scale) << "\n";
    os << "sensor.sensitivity = " << full_precision(cfg.sensor.sensitivity) << "\n";
    os << "sensor.reflect_base = " << full_precision(cfg.sensor.reflect_base) << "\n";
    os << "sensor.reflect_slope_per_mm = " << full_precision(cfg.sensor.reflect_slope_per_mm)
       << "\n";

    for (auto tag : {synth::DistanceTag::near, synth::DistanceTag::mid, synth::DistanceTag::far}) {
        const auto dm = cfg.distance_m.find(tag);
        if (dm != cfg.distance_m.end()) {
            os << "distance." << synth::to_string(tag) << ".meters = " << full_precision(dm->second)
               << "\n";
        }
        const auto np = cfg.noise.find(tag);
        if (np != cfg.noise.end()) {
            os << "noise." << synth::to_string(tag) << ".sigma = " << full_precision(np->second.sigma)
               << "\n";
            os << "noise." << synth::to_string(tag)
               << ".drift_amplitude = " << full_precision(np->second.drift_amplitude) << "\n";
        }
    }

    os << "dsp.moving_average_points = " << cfg.extract.moving_average_points << "\n";
    os << "dsp.detrend_order = " << cfg.extract.detrend_order << "\n";
    os << "features.esa_threshold_pct = " << full_precision(cfg.extract.esa_threshold_pct) << "\n";
    os << "features.esa_bins = " << cfg.extract.esa_bins << "\n";
    os << "features.rate_bin_min = " << cfg.extract.rate_range.lo << "\n";
    os << "features.rate_bin_max = " << cfg.extract.rate_range.hi << "\n";

    os << "tree.max_depth = " << depth_to_file(cfg.tree.max_depth) << "\n";
    os << "tree.min_samples_split = " << cfg.tree.min_samples_split << "\n";
    os << "tree.impurity = " << (cfg.tree.impurity == ml::Impurity::gini ? "gini" : "entropy")
       << "\n";

    os << "forest.n_trees = " << cfg.forest.n_trees << "\n";
    os << "forest.feature_subset_size = " << cfg.forest.feature_subset_size << "\n";
    os << "forest.bootstrap_size = " << cfg.forest.bootstrap_size << "\n";
    os << "forest.tree_max_depth = " << cfg.forest_tree_max_depth << "\n";

    os << "eval.cv_folds = " << cfg.cv_folds << "\n";
    os << "eval.stratified = " << (cfg.stratified ? "true" : "false") << "\n";
    os << "eval.snr_reference = " << snr_reference_name(cfg.snr_reference) << "\n";
}

synth::DatasetSpec make_dataset_spec(const ExperimentConfig& cfg,
                                     std::vector<synth::DistanceTag> subset) {
    synth::DatasetSpec spec;
    spec.record = cfg.record;
    spec.channel = cfg.channel;
    spec.sensor = cfg.sensor;
    spec.records_per_class = cfg.records_per_class;
    spec.seed = cfg.seed;

    const auto& tags = subset.empty() ? cfg.distances : subset;
    for (synth::DistanceTag tag : tags) {
        synth::DatasetSpec::PerDistance per;
        per.tag = tag;
        per.distance_m = cfg.distance_m.at(tag);
        per.noise = cfg.noise.at(tag);
        spec.distances.push_back(per);
    }
    return spec;
}

ml::TreeHyperparams forest_tree_hyper(const ExperimentConfig& cfg) {
    ml::TreeHyperparams th = cfg.tree;
    th.max_depth =
        cfg.forest_tree_max_depth == 0 ? ml::kUnlimitedDepth : cfg.forest_tree_max_depth;
    return th;
}

bool use_averaged_reference(const ExperimentConfig& cfg, std::size_t n_distances) {
    switch (cfg.snr_reference) {
        case SnrReference::per_distance: return false;
        case SnrReference::averaged: return true;
        case SnrReference::automatic: break;
    }
    return n_distances > 1;
}

}  // namespace respilab::config
