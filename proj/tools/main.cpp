#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"respilab: synthetic light-wave respiration sensing and classification"};
    app.require_subcommand(1);

    respilab::cli::CommonOptions common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config_path, "config file (key = value format)");
        sub->add_option("--seed", common.seed, "override the config seed");
        sub->add_option("--distances", common.distances,
                        "override the distance set, e.g. near,mid");
    };

    // synth
    auto* synth = app.add_subcommand("synth", "generate a labeled dataset as CSV");
    std::string synth_out = "data.csv", synth_ts, synth_noise;
    synth->add_option("-o,--out", synth_out, "data CSV path")->required();
    synth->add_option("--timestamps", synth_ts, "timestamp file path (default <out>_timestamps.csv)");
    synth->add_option("--noise-prefix", synth_noise,
                      "noise file prefix (default <out stem>_noise -> _noise_<tag>.csv)");
    add_common(synth);

    // features
    auto* feat = app.add_subcommand("features", "extract feature rows from a data CSV");
    std::string feat_data, feat_out = "features.csv";
    std::vector<std::string> feat_noise;
    feat->add_option("-i,--data", feat_data, "input data CSV")->required();
    feat->add_option("-n,--noise", feat_noise, "noise CSV as tag=path (repeatable)")->required();
    feat->add_option("-o,--out", feat_out, "output feature CSV")->required();
    add_common(feat);

    // train
    auto* train = app.add_subcommand("train", "fit a model on the training split");
    std::string train_features, train_kind = "tree", train_out = "model.txt";
    train->add_option("-i,--features", train_features, "feature CSV")->required();
    train->add_option("-m,--model", train_kind, "model kind: tree or forest")
        ->check(CLI::IsMember({"tree", "forest"}));
    train->add_option("-o,--out", train_out, "model file path")->required();
    add_common(train);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "score a saved model on a feature CSV");
    std::string eval_model, eval_features, eval_confusion;
    evaluate->add_option("-m,--model", eval_model, "model file")->required();
    evaluate->add_option("-i,--features", eval_features, "feature CSV")->required();
    evaluate->add_option("--confusion", eval_confusion, "write the confusion matrix CSV here");
    add_common(evaluate);

    // sweep
    auto* sweep = app.add_subcommand("sweep", "hyperparameter sweep (depth or forest size 1-25)");
    std::string sweep_features, sweep_kind = "tree", sweep_out = "sweep.csv";
    sweep->add_option("-i,--features", sweep_features, "feature CSV")->required();
    sweep->add_option("-m,--model", sweep_kind, "model kind: tree or forest")
        ->check(CLI::IsMember({"tree", "forest"}));
    sweep->add_option("-o,--out", sweep_out, "sweep curve CSV")->required();
    add_common(sweep);

    // cv
    auto* cv = app.add_subcommand("cv", "k-fold cross-validation on the train+validation pool");
    std::string cv_features, cv_kind = "tree";
    cv->add_option("-i,--features", cv_features, "feature CSV")->required();
    cv->add_option("-m,--model", cv_kind, "model kind: tree or forest")
        ->check(CLI::IsMember({"tree", "forest"}));
    add_common(cv);

    // reproduce
    auto* reproduce =
        app.add_subcommand("reproduce", "full protocol over all distance-set rows, both models");
    std::string reproduce_out = "reports";
    reproduce->add_option("-o,--out-dir", reproduce_out, "output directory")->required();
    add_common(reproduce);

    CLI11_PARSE(app, argc, argv);

    try {
        const auto cfg = respilab::cli::resolve_config(common);
        if (synth->parsed()) {
            respilab::cli::cmd_synth(cfg, synth_out, synth_ts, synth_noise);
        } else if (feat->parsed()) {
            respilab::cli::cmd_features(cfg, feat_data, feat_noise, feat_out);
        } else if (train->parsed()) {
            respilab::cli::cmd_train(cfg, train_features, train_kind, train_out);
        } else if (evaluate->parsed()) {
            respilab::cli::cmd_evaluate(cfg, eval_model, eval_features, eval_confusion);
        } else if (sweep->parsed()) {
            respilab::cli::cmd_sweep(cfg, sweep_features, sweep_kind, sweep_out);
        } else if (cv->parsed()) {
            respilab::cli::cmd_cv(cfg, cv_features, cv_kind);
        } else if (reproduce->parsed()) {
            respilab::cli::cmd_reproduce(cfg, reproduce_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
