#include <benchmark/benchmark.h>

#include "respilab/config.hpp"
#include "respilab/dsp.hpp"
#include "respilab/features.hpp"
#include "respilab/ml.hpp"
#include "respilab/synth.hpp"

namespace {

using namespace respilab;

dsp::Trace make_trace(std::size_t n) {
    Rng rng(123);
    std::normal_distribution<double> gauss(0.0, 1.0);
    dsp::Trace t;
    t.values.resize(n);
    for (double& v : t.values) v = gauss(rng);
    return t;
}

void BM_MovingAverage(benchmark::State& state) {
    const auto trace = make_trace(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto out = dsp::moving_average(trace, 50);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MovingAverage)->Range(1024, 8192)->Complexity();

void BM_PolyfitDetrend(benchmark::State& state) {
    const auto trace = make_trace(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto out = dsp::polyfit_detrend(trace.values, 5);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PolyfitDetrend)->Range(1024, 8192)->Complexity();

void BM_DftMagnitudes(benchmark::State& state) {
    const auto trace = make_trace(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto out = dsp::dft_magnitudes(trace);
        benchmark::DoNotOptimize(out);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DftMagnitudes)->Range(1024, 8192)->Complexity();

synth::LabeledDataset small_dataset(int per_class) {
    auto cfg = config::default_config();
    cfg.records_per_class = per_class;
    cfg.distances = {synth::DistanceTag::near};
    return synth::synth_dataset(config::make_dataset_spec(cfg));
}

void BM_SynthRecord(benchmark::State& state) {
    const auto cfg = config::default_config();
    auto spec = config::make_dataset_spec(cfg, {synth::DistanceTag::near});
    spec.records_per_class = 1;
    for (auto _ : state) {
        auto dataset = synth::synth_dataset(spec);
        benchmark::DoNotOptimize(dataset);
        spec.seed += 1;
    }
}
BENCHMARK(BM_SynthRecord);

void BM_ExtractFeatures(benchmark::State& state) {
    const auto dataset = small_dataset(1);
    const auto ref = features::make_noise_reference(dataset.noise_traces.front().first,
                                                    dataset.noise_traces.front().second);
    std::size_t i = 0;
    for (auto _ : state) {
        auto f = features::extract(dataset.records[i % dataset.records.size()], ref);
        benchmark::DoNotOptimize(f);
        ++i;
    }
}
BENCHMARK(BM_ExtractFeatures);

ml::Dataset feature_dataset(int per_class) {
    const auto dataset = small_dataset(per_class);
    const auto ref = features::make_noise_reference(dataset.noise_traces.front().first,
                                                    dataset.noise_traces.front().second);
    std::vector<features::FeatureVector> rows;
    rows.reserve(dataset.records.size());
    for (const auto& r : dataset.records) rows.push_back(features::extract(r, ref));
    return features::to_dataset(rows);
}

void BM_FitTree(benchmark::State& state) {
    const auto data = feature_dataset(static_cast<int>(state.range(0)));
    const ml::TreeHyperparams hyper{10, 2, ml::Impurity::gini};
    for (auto _ : state) {
        auto tree = ml::fit_tree(data, hyper);
        benchmark::DoNotOptimize(tree);
    }
}
BENCHMARK(BM_FitTree)->Arg(10)->Arg(50);

void BM_FitForest(benchmark::State& state) {
    const auto data = feature_dataset(static_cast<int>(state.range(0)));
    const ml::ForestHyperparams fh{12, 2, 0, 99};
    const ml::TreeHyperparams th{};
    for (auto _ : state) {
        auto forest = ml::fit_forest(data, fh, th);
        benchmark::DoNotOptimize(forest);
    }
}
BENCHMARK(BM_FitForest)->Arg(10)->Arg(50);

}  // namespace

int main(int argc, char** argv) {
    ::benchmark::Initialize(&argc, argv);
    if (::benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    ::benchmark::RunSpecifiedBenchmarks();
    ::benchmark::Shutdown();
    return 0;
}
