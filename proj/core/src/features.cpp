#include "respilab/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace respilab::features {

namespace {

double mean(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double energy(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

}  // namespace

NoiseReference make_noise_reference(synth::DistanceTag tag, std::span<const double> raw) {
    if (raw.empty()) throw std::invalid_argument("noise reference: empty trace");
    NoiseReference ref;
    ref.tag = tag;
    const double m = mean(raw);
    ref.trace.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) ref.trace[i] = raw[i] - m;
    ref.rms = std::sqrt(energy(ref.trace) / static_cast<double>(ref.trace.size()));
    if (ref.rms <= 0.0) throw std::invalid_argument("noise reference: zero noise energy");
    return ref;
}

NoiseReference averaged_reference(std::span<const NoiseReference> refs) {
    if (refs.empty()) throw std::invalid_argument("averaged reference: no inputs");
    double mean_square = 0.0;
    for (const auto& r : refs) mean_square += r.rms * r.rms;
    mean_square /= static_cast<double>(refs.size());

    NoiseReference avg;
    avg.tag = refs.front().tag;
    avg.rms = std::sqrt(mean_square);
    return avg;  // trace left empty: only the energy level is shared
}

double peak_to_peak(std::span<const double> z) {
    if (z.empty()) throw std::invalid_argument("peak_to_peak: empty trace");
    auto [lo, hi] = std::minmax_element(z.begin(), z.end());
    return *hi - *lo;
}

double breathing_rate(const dsp::Spectrum& s, dsp::BinRange range) {
    const dsp::PeakBin peak = dsp::peak_bin(s, range);
    return static_cast<double>(peak.bin) * s.bin_to_bpm();
}

double effective_spectral_amplitude(const dsp::Spectrum& s, double threshold_pct,
                                    std::size_t n_bins) {
    if (threshold_pct <= 0.0 || threshold_pct >= 100.0) {
        throw std::invalid_argument("effective_spectral_amplitude: threshold must be in (0,100)");
    }
    if (n_bins < 1 || n_bins > s.magnitudes.size() - 1) {
        throw std::invalid_argument("effective_spectral_amplitude: n_bins out of range");
    }
    // Bins 1..n_bins; detrending zeroes the DC bin so it carries no signal.
    double peak = 0.0;
    for (std::size_t k = 1; k <= n_bins; ++k) peak = std::max(peak, s.magnitudes[k]);
    const double threshold = (threshold_pct / 100.0) * peak;
    std::size_t count = 0;
    for (std::size_t k = 1; k <= n_bins; ++k) {
        if (s.magnitudes[k] >= threshold) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(n_bins) * 100.0;
}

double snr_db(std::span<const double> z, const NoiseReference& noise) {
    if (z.empty()) throw std::invalid_argument("snr_db: empty trace");
    if (noise.rms <= 0.0) throw std::invalid_argument("snr_db: zero noise energy");
    if (!noise.trace.empty() && noise.trace.size() != z.size()) {
        throw std::invalid_argument("snr_db: signal and noise lengths differ");
    }
    const double signal_rss = std::sqrt(energy(z));
    const double noise_rss = noise.rms * std::sqrt(static_cast<double>(z.size()));
    return 20.0 * std::log10(signal_rss / noise_rss);
}

FeatureVector extract(const synth::SensedRecord& record, const NoiseReference& noise,
                      const ExtractParams& params) {
    dsp::Trace raw{record.samples, 1.0};
    if (record.timestamps.size() > 1) {
        raw.sample_rate = 1.0 / (record.timestamps[1] - record.timestamps[0]);
    }
    const dsp::Trace filtered = dsp::moving_average(raw, params.moving_average_points);
    const dsp::DetrendResult detrended =
        dsp::polyfit_detrend(filtered.values, params.detrend_order);
    const dsp::Spectrum spectrum =
        dsp::dft_magnitudes(dsp::Trace{detrended.residual, filtered.sample_rate});

    FeatureVector f;
    f.peak_to_peak = peak_to_peak(detrended.residual);
    f.rate_bpm = breathing_rate(spectrum, params.rate_range);
    f.effective_spectral_amplitude =
        effective_spectral_amplitude(spectrum, params.esa_threshold_pct, params.esa_bins);

    // SNR compares the mean-subtracted filtered trace against the noise
    // reference; the detrended trace is not used on this path.
    std::vector<double> centered = filtered.values;
    const double m = mean(centered);
    for (double& v : centered) v -= m;
    f.snr_db = snr_db(centered, noise);

    f.label = record.label;
    return f;
}

ml::Dataset to_dataset(std::span<const FeatureVector> features) {
    ml::Dataset data;
    for (const auto& f : features) {
        const auto v = f.values();
        data.add(std::vector<double>(v.begin(), v.end()), f.label);
    }
    return data;
}

}  // namespace respilab::features
