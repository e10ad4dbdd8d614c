#pragma once

#include <span>
#include <vector>

#include "respilab/dsp.hpp"
#include "respilab/ml.hpp"
#include "respilab/synth.hpp"

namespace respilab::features {

inline constexpr int kNumFeatures = 4;

/// The four handcrafted descriptors of one record, plus its class label.
struct FeatureVector {
    double peak_to_peak = 0.0;                 // V
    double rate_bpm = 0.0;
    double effective_spectral_amplitude = 0.0; // percent of counted bins
    double snr_db = 0.0;
    int label = 0;

    std::array<double, kNumFeatures> values() const {
        return {peak_to_peak, rate_bpm, effective_spectral_amplitude, snr_db};
    }
};

/// Mean-subtracted standstill noise trace for one distance (or an energy
/// average across distances, in which case the trace is empty).
struct NoiseReference {
    synth::DistanceTag tag = synth::DistanceTag::near;
    std::vector<double> trace;  // mean-subtracted raw noise samples
    double rms = 0.0;           // V, > 0
};

NoiseReference make_noise_reference(synth::DistanceTag tag, std::span<const double> raw);

// RMS-domain average of several references (SNR is an energy ratio).
NoiseReference averaged_reference(std::span<const NoiseReference> refs);

double peak_to_peak(std::span<const double> z);

// Peak-bin frequency in BPM.
double breathing_rate(const dsp::Spectrum& s, dsp::BinRange range = {});

// Percentage of the first n_bins non-DC bins whose magnitude reaches
// threshold_pct percent of the peak magnitude over those bins. Low for a
// clean periodic trace, high for a noise-like one.
double effective_spectral_amplitude(const dsp::Spectrum& s, double threshold_pct = 20.0,
                                    std::size_t n_bins = 100);

// 20*log10 of the signal/noise RMS ratio. When the reference carries a
// concrete trace it must match the signal length. Throws on zero noise
// energy.
double snr_db(std::span<const double> z, const NoiseReference& noise);

struct ExtractParams {
    std::size_t moving_average_points = 50;
    int detrend_order = 5;
    double esa_threshold_pct = 20.0;
    std::size_t esa_bins = 100;
    dsp::BinRange rate_range{1, 100};
};

// Full conditioning chain: moving average, polynomial detrend, then the
// four features. SNR uses the mean-subtracted filtered trace (detrending
// is not applied on that path).
FeatureVector extract(const synth::SensedRecord& record, const NoiseReference& noise,
                      const ExtractParams& params = {});

// Feature rows in ml form: x = the 4 descriptors, y = labels.
ml::Dataset to_dataset(std::span<const FeatureVector> features);

}  // namespace respilab::features
