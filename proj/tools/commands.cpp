#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "respilab/eval.hpp"
#include "respilab/features.hpp"
#include "respilab/io.hpp"
#include "respilab/ml.hpp"
#include "respilab/synth.hpp"

namespace respilab::cli {

namespace {

using synth::DistanceTag;

constexpr int kSweepGridMax = 25;

std::vector<DistanceTag> parse_distance_list(const std::string& spec) {
    std::vector<DistanceTag> tags;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) tags.push_back(synth::distance_tag_from_string(item));
    }
    if (tags.empty()) throw std::runtime_error("empty distance list");
    return tags;
}

std::string percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f%%", fraction * 100.0);
    return buf;
}

ml::ForestHyperparams seeded_forest(const config::ExperimentConfig& cfg, std::uint64_t seed) {
    ml::ForestHyperparams fh = cfg.forest;
    fh.seed = seed;
    return fh;
}

eval::ModelFactory factory_for(const config::ExperimentConfig& cfg, const std::string& kind) {
    if (kind == "tree") return eval::tree_factory(cfg.tree);
    if (kind == "forest") return eval::forest_factory(cfg.forest, config::forest_tree_hyper(cfg));
    throw std::runtime_error("unknown model kind '" + kind + "' (expected tree or forest)");
}

std::function<eval::ModelFactory(int)> sweep_family(const config::ExperimentConfig& cfg,
                                                    const std::string& kind) {
    if (kind == "tree") {
        return [cfg](int depth) {
            ml::TreeHyperparams th = cfg.tree;
            th.max_depth = depth;
            return eval::tree_factory(th);
        };
    }
    if (kind == "forest") {
        return [cfg](int n_trees) {
            ml::ForestHyperparams fh = cfg.forest;
            fh.n_trees = n_trees;
            return eval::forest_factory(fh, config::forest_tree_hyper(cfg));
        };
    }
    throw std::runtime_error("unknown model kind '" + kind + "' (expected tree or forest)");
}

std::vector<int> grid_1_to(int hi) {
    std::vector<int> grid(static_cast<std::size_t>(hi));
    for (int i = 0; i < hi; ++i) grid[static_cast<std::size_t>(i)] = i + 1;
    return grid;
}

// "0.5m" or "0.5m+1m": the distance-set label used in reports and paths.
std::string row_label(const config::ExperimentConfig& cfg, std::span<const DistanceTag> tags) {
    std::string label;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (i != 0) label += '+';
        label += io::format_sig9(cfg.distance_m.at(tags[i]));
        label += 'm';
    }
    return label;
}

}  // namespace

config::ExperimentConfig resolve_config(const CommonOptions& opts) {
    config::ExperimentConfig cfg =
        opts.config_path.empty() ? config::default_config() : config::load_config(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.distances) cfg.distances = parse_distance_list(*opts.distances);
    return cfg;
}

void cmd_synth(const config::ExperimentConfig& cfg, const std::filesystem::path& out_data,
               std::filesystem::path out_timestamps, std::filesystem::path noise_prefix) {
    if (out_timestamps.empty()) {
        out_timestamps = out_data;
        out_timestamps.replace_filename(out_data.stem().string() + "_timestamps.csv");
    }
    if (noise_prefix.empty()) {
        noise_prefix = out_data;
        noise_prefix.replace_filename(out_data.stem().string() + "_noise");
    }

    const synth::LabeledDataset dataset = synth::synth_dataset(config::make_dataset_spec(cfg));
    io::write_data_csv(out_data, dataset.records);
    io::write_timestamps_csv(out_timestamps, dataset.records);
    for (const auto& [tag, trace] : dataset.noise_traces) {
        std::filesystem::path noise_path = noise_prefix;
        noise_path += "_" + synth::to_string(tag) + ".csv";
        io::write_noise_csv(noise_path, trace);
    }
    std::cout << "wrote " << dataset.records.size() << " records to " << out_data.string()
              << " (+" << dataset.noise_traces.size() << " noise records)\n";
}

void cmd_features(const config::ExperimentConfig& cfg, const std::filesystem::path& data_csv,
                  const std::vector<std::string>& noise_specs,
                  const std::filesystem::path& out_csv) {
    if (noise_specs.empty()) throw std::runtime_error("features: at least one --noise is required");

    std::vector<features::NoiseReference> refs;
    for (const std::string& spec : noise_specs) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("features: --noise expects tag=path, got '" + spec + "'");
        }
        const DistanceTag tag = synth::distance_tag_from_string(spec.substr(0, eq));
        const auto trace = io::read_noise_csv(spec.substr(eq + 1));
        refs.push_back(features::make_noise_reference(tag, trace));
    }
    const features::NoiseReference reference =
        refs.size() == 1 ? refs.front() : features::averaged_reference(refs);

    const auto rows = io::read_data_csv(data_csv);
    std::vector<features::FeatureVector> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        synth::SensedRecord record;
        record.samples = row.samples;
        record.label = row.label;
        record.timestamps.resize(row.samples.size());
        for (std::size_t i = 0; i < row.samples.size(); ++i) {
            record.timestamps[i] = static_cast<double>(i) / cfg.record.sample_rate_hz;
        }
        features::NoiseReference ref = reference;
        if (!ref.trace.empty() && ref.trace.size() != record.samples.size()) {
            // Reference and record lengths can differ between configs; the
            // energy level is what matters for the ratio.
            ref.trace.clear();
        }
        out.push_back(features::extract(record, ref, cfg.extract));
    }
    io::write_features_csv(out_csv, out);
    std::cout << "wrote " << out.size() << " feature rows to " << out_csv.string() << "\n";
}

void cmd_train(const config::ExperimentConfig& cfg, const std::filesystem::path& features_csv,
               const std::string& kind, const std::filesystem::path& model_out) {
    const auto rows = io::read_features_csv(features_csv);
    const ml::Dataset data = features::to_dataset(rows);
    const eval::DatasetSplit split =
        eval::stratified_split(data.y, cfg.seed, {}, cfg.stratified);
    const ml::Dataset train = data.subset(split.train);

    auto report_accuracy = [&](auto&& predict) {
        auto score = [&](const std::vector<int>& idx) {
            std::vector<int> pred, truth;
            pred.reserve(idx.size());
            truth.reserve(idx.size());
            for (int i : idx) {
                pred.push_back(predict(data.x[static_cast<std::size_t>(i)]));
                truth.push_back(data.y[static_cast<std::size_t>(i)]);
            }
            return eval::accuracy(pred, truth);
        };
        std::cout << "train accuracy      " << percent(score(split.train)) << "\n"
                  << "validation accuracy " << percent(score(split.validation)) << "\n"
                  << "test accuracy       " << percent(score(split.test)) << "\n";
    };

    if (kind == "tree") {
        const ml::DecisionTreeModel model = ml::fit_tree(train, cfg.tree);
        report_accuracy([&](std::span<const double> x) { return model.predict(x); });
        io::save_model(model_out, model);
    } else if (kind == "forest") {
        const ml::RandomForestModel model = ml::fit_forest(
            train, seeded_forest(cfg, mix_seed(cfg.seed, 0xf0)), config::forest_tree_hyper(cfg));
        report_accuracy([&](std::span<const double> x) { return model.predict(x); });
        io::save_model(model_out, model);
    } else {
        throw std::runtime_error("unknown model kind '" + kind + "' (expected tree or forest)");
    }
    std::cout << "saved model to " << model_out.string() << "\n";
}

void cmd_evaluate(const config::ExperimentConfig& cfg, const std::filesystem::path& model_path,
                  const std::filesystem::path& features_csv, std::filesystem::path confusion_out) {
    (void)cfg;
    const ml::AnyModel model = io::load_model(model_path);
    const auto rows = io::read_features_csv(features_csv);
    const ml::Dataset data = features::to_dataset(rows);

    std::vector<int> pred;
    pred.reserve(data.size());
    for (const auto& row : data.x) pred.push_back(model.predict(row));

    const auto confusion = eval::confusion_matrix(pred, data.y, synth::kNumClasses);
    std::cout << "accuracy " << percent(eval::accuracy(pred, data.y)) << " on " << data.size()
              << " records\n";
    std::cout << "confusion matrix (rows = true label, columns = predicted):\n";
    for (const auto& row : confusion) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            std::cout << (j == 0 ? "" : " ") << row[j];
        }
        std::cout << "\n";
    }
    if (!confusion_out.empty()) io::write_confusion_csv(confusion_out, confusion);
}

void cmd_sweep(const config::ExperimentConfig& cfg, const std::filesystem::path& features_csv,
               const std::string& kind, const std::filesystem::path& out_csv) {
    const auto rows = io::read_features_csv(features_csv);
    const ml::Dataset data = features::to_dataset(rows);
    const eval::DatasetSplit split =
        eval::stratified_split(data.y, cfg.seed, {}, cfg.stratified);
    const eval::SweepCurve curve =
        eval::sweep(data, split, grid_1_to(kSweepGridMax), sweep_family(cfg, kind),
                    mix_seed(cfg.seed, 0x577));
    io::write_sweep_csv(out_csv, curve);
    std::cout << "chosen " << (kind == "tree" ? "depth" : "forest size") << " " << curve.chosen
              << " (saturation rule); curve written to " << out_csv.string() << "\n";
}

void cmd_cv(const config::ExperimentConfig& cfg, const std::filesystem::path& features_csv,
            const std::string& kind) {
    const auto rows = io::read_features_csv(features_csv);
    const ml::Dataset data = features::to_dataset(rows);
    const eval::EvalReport report =
        eval::run_protocol(data, factory_for(cfg, kind), cfg.seed, mix_seed(cfg.seed, 0xf17),
                           cfg.cv_folds, cfg.stratified);
    std::cout << "cv train accuracy " << percent(report.cv_train_accuracy) << "\n"
              << "cv test accuracy  " << percent(report.cv_test_accuracy) << "\n"
              << "held-out test     " << percent(report.test_accuracy) << "\n";
}

void cmd_reproduce(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    const synth::LabeledDataset dataset = synth::synth_dataset(config::make_dataset_spec(cfg));
    std::map<DistanceTag, features::NoiseReference> refs;
    for (const auto& [tag, trace] : dataset.noise_traces) {
        refs.emplace(tag, features::make_noise_reference(tag, trace));
    }

    // Distance-set rows: each single, consecutive pairs, then all together.
    std::vector<std::vector<DistanceTag>> rows;
    for (DistanceTag tag : cfg.distances) rows.push_back({tag});
    for (std::size_t i = 0; i + 1 < cfg.distances.size(); ++i) {
        rows.push_back({cfg.distances[i], cfg.distances[i + 1]});
    }
    if (cfg.distances.size() > 2) rows.push_back(cfg.distances);

    const std::vector<std::pair<std::string, std::string>> models = {
        {"tree", "decision_tree"}, {"forest", "random_forest"}};
    std::map<std::string, std::vector<io::ReportRow>> tables;

    for (std::size_t row_idx = 0; row_idx < rows.size(); ++row_idx) {
        const auto& tags = rows[row_idx];
        const std::string label = row_label(cfg, tags);

        const bool averaged = config::use_averaged_reference(cfg, tags.size());
        features::NoiseReference shared;
        if (averaged) {
            std::vector<features::NoiseReference> used;
            for (DistanceTag tag : tags) used.push_back(refs.at(tag));
            shared = features::averaged_reference(used);
        }

        std::vector<features::FeatureVector> feats;
        for (const auto& record : dataset.records) {
            if (std::find(tags.begin(), tags.end(), record.distance) == tags.end()) continue;
            const features::NoiseReference& ref = averaged ? shared : refs.at(record.distance);
            feats.push_back(features::extract(record, ref, cfg.extract));
        }
        const ml::Dataset data = features::to_dataset(feats);
        const std::uint64_t split_seed = mix_seed(cfg.seed, 0x5eed, row_idx);

        for (std::size_t m = 0; m < models.size(); ++m) {
            const auto& [kind, file_kind] = models[m];
            const eval::SweepCurve curve = eval::sweep(
                data, eval::stratified_split(data.y, split_seed, {}, cfg.stratified),
                grid_1_to(kSweepGridMax), sweep_family(cfg, kind), mix_seed(split_seed, m, 0x577));
            io::write_sweep_csv(out_dir / ("sweep_" + file_kind + "_" + label + ".csv"), curve);

            const eval::EvalReport report =
                eval::run_protocol(data, factory_for(cfg, kind), split_seed,
                                   mix_seed(split_seed, m, 0xf17), cfg.cv_folds, cfg.stratified);
            io::write_confusion_csv(out_dir / ("confusion_" + file_kind + "_" + label + ".csv"),
                                    report.confusion);
            tables[file_kind].push_back({label, report});
        }
    }

    for (const auto& [file_kind, table] : tables) {
        io::write_report_csv(out_dir / ("report_" + file_kind + ".csv"), table);
    }

    for (const auto& [kind, file_kind] : models) {
        std::cout << "\n" << file_kind << " accuracies\n";
        std::cout << "distances        train    valid    test     cv-train cv-test\n";
        for (const auto& row : tables[file_kind]) {
            std::printf("%-16s %-8s %-8s %-8s %-8s %-8s\n", row.distances.c_str(),
                        percent(row.report.train_accuracy).c_str(),
                        percent(row.report.validation_accuracy).c_str(),
                        percent(row.report.test_accuracy).c_str(),
                        percent(row.report.cv_train_accuracy).c_str(),
                        percent(row.report.cv_test_accuracy).c_str());
        }
    }
    std::cout << "\nreport files written to " << out_dir.string() << "\n";
}

}  // namespace respilab::cli
