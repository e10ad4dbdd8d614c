#include "respilab/synth.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>

namespace respilab::synth {

bool pattern_supported(int exponent) {
    return exponent == 1 || exponent == 2 || exponent == 4 || exponent == 6;
}

const std::array<ClassSpec, kNumClasses>& class_table() {
    static const std::array<ClassSpec, kNumClasses> table = {{
        {0, "eupnea", 12, 20, 30, 58},
        {1, "apnea", 0, 0, 0, 0},
        {2, "tachypnea", 21, 50, 30, 58},
        {3, "bradypnea", 1, 11, 30, 58},
        {4, "hyperpnea", 12, 20, 59, 100},
        {5, "hypopnea", 12, 20, 1, 29},
        {6, "kussmauls", 21, 50, 59, 100},
        {7, "faulty", 0, 50, 0, 100},
    }};
    return table;
}

namespace {

std::size_t sample_count(double duration_s, double sample_rate_hz) {
    const double exact = duration_s * sample_rate_hz;
    const double rounded = std::round(exact);
    if (rounded < 1.0 || std::abs(exact - rounded) > 1e-9) {
        throw std::invalid_argument(
            "motion: duration * sample_rate must be a positive integer sample count");
    }
    return static_cast<std::size_t>(rounded);
}

// Drift polynomial (descending powers) over the normalized index.
double polyval(std::span<const double> coeffs, double u) {
    double acc = 0.0;
    for (double c : coeffs) acc = acc * u + c;
    return acc;
}

}  // namespace

std::vector<double> chest_motion(const MotionParams& p) {
    if (!pattern_supported(p.pattern.exponent)) {
        throw std::invalid_argument("chest_motion: pattern exponent must be 1, 2, 4 or 6");
    }
    if (p.rate_bpm < 0.0 || p.rate_bpm > 50.0) {
        throw std::invalid_argument("chest_motion: rate must lie in [0, 50] BPM");
    }
    if (p.depth_pct < 0.0 || p.depth_pct > 100.0) {
        throw std::invalid_argument("chest_motion: depth must lie in [0, 100] percent");
    }
    const std::size_t n = sample_count(p.duration_s, p.sample_rate_hz);
    const double amplitude = (p.depth_pct / 100.0) * kFullDepthMm;
    const double freq_hz = p.rate_bpm / 60.0;

    std::vector<double> position(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / p.sample_rate_hz;
        const double s = std::sin(std::numbers::pi * freq_hz * t);
        double shape;
        if (p.pattern.exponent == 1) {
            shape = std::abs(s);
        } else {
            shape = std::pow(s, p.pattern.exponent);
        }
        position[i] = p.offset_mm + amplitude * shape;
    }
    return position;
}

double ChannelParams::lambert_order() const {
    return -std::log(2.0) / std::log(std::cos(half_angle_rad));
}

double lambertian_power(const ChannelParams& c) {
    if (c.incidence_angle_rad >= c.half_angle_rad) return 0.0;  // outside field of view
    const double order = c.lambert_order();
    const double geometry = (order + 1.0) * c.intercept_area * c.transmit_power /
                            (2.0 * std::numbers::pi * std::pow(c.distance_m, c.path_loss_exponent));
    return geometry * std::pow(std::cos(c.irradiance_angle_rad), order) *
           std::cos(c.incidence_angle_rad);
}

double sensor_voltage(double received_power, const SensorParams& s) {
    if (s.sensitivity <= 0.0) {
        throw std::invalid_argument("sensor_voltage: sensitivity must be positive");
    }
    if (received_power < 0.0) {
        throw std::invalid_argument("sensor_voltage: received power must be >= 0");
    }
    const double photodetector = s.transimpedance_gain * (s.dark_current + s.responsivity * received_power);
    return (s.full_scale * s.lockin_ref_amplitude) / (2.0 * s.sensitivity) * photodetector;
}

std::string to_string(DistanceTag tag) {
    switch (tag) {
        case DistanceTag::near: return "near";
        case DistanceTag::mid: return "mid";
        case DistanceTag::far: return "far";
    }
    return "near";
}

DistanceTag distance_tag_from_string(const std::string& s) {
    if (s == "near") return DistanceTag::near;
    if (s == "mid") return DistanceTag::mid;
    if (s == "far") return DistanceTag::far;
    throw std::invalid_argument("unknown distance tag '" + s + "' (expected near, mid or far)");
}

MotionParams sample_class_params(const ClassSpec& spec, const RecordParams& rp, Rng& rng) {
    MotionParams m;
    m.offset_mm = rp.offset_mm;
    m.duration_s = rp.duration_s;
    m.sample_rate_hz = rp.sample_rate_hz;
    m.pattern = rp.pattern;

    // Integral BPM keeps the true rate on a DFT bin of the 60 s window.
    std::uniform_int_distribution<int> rate(static_cast<int>(spec.rate_min_bpm),
                                            static_cast<int>(spec.rate_max_bpm));
    m.rate_bpm = static_cast<double>(rate(rng));
    std::uniform_real_distribution<double> depth(spec.depth_min_pct, spec.depth_max_pct);
    m.depth_pct = depth(rng);
    return m;
}

std::vector<double> clean_voltage(const MotionParams& m, const ChannelParams& c,
                                  const SensorParams& s) {
    const double incident = lambertian_power(c);
    std::vector<double> chest = chest_motion(m);
    for (double& v : chest) {
        const double scattered = incident * (s.reflect_base + s.reflect_slope_per_mm * v);
        v = sensor_voltage(std::max(scattered, 0.0), s);
    }
    return chest;
}

double full_depth_swing(const ChannelParams& c, const SensorParams& s) {
    const double incident = lambertian_power(c);
    const double low = sensor_voltage(std::max(incident * s.reflect_base, 0.0), s);
    const double high = sensor_voltage(
        std::max(incident * (s.reflect_base + s.reflect_slope_per_mm * kFullDepthMm), 0.0), s);
    return std::abs(high - low);
}

NoiseModel make_noise_model(const NoisePreset& preset, bool faulty, std::size_t n_samples,
                            double signal_scale, Rng& rng) {
    NoiseModel model;
    model.gaussian_sigma = preset.sigma;

    std::uniform_real_distribution<double> coeff(-preset.drift_amplitude, preset.drift_amplitude);
    model.drift.resize(6);  // order-5 polynomial
    for (double& c : model.drift) c = coeff(rng);

    if (faulty && n_samples > 0) {
        std::uniform_int_distribution<int> burst_count(1, 4);
        std::uniform_int_distribution<std::size_t> burst_len(25, std::min<std::size_t>(400, n_samples));
        std::uniform_real_distribution<double> burst_amp(0.5, 3.0);
        std::uniform_int_distribution<int> sign(0, 1);
        const int n_bursts = burst_count(rng);
        for (int i = 0; i < n_bursts; ++i) {
            Burst b;
            b.length = burst_len(rng);
            std::uniform_int_distribution<std::size_t> start(0, n_samples - b.length);
            b.start = start(rng);
            b.amplitude = burst_amp(rng) * signal_scale * (sign(rng) ? 1.0 : -1.0);
            model.bursts.push_back(b);
        }
        std::uniform_int_distribution<int> dropout_count(1, 3);
        std::uniform_int_distribution<std::size_t> dropout_len(100, std::min<std::size_t>(800, n_samples));
        const int n_dropouts = dropout_count(rng);
        for (int i = 0; i < n_dropouts; ++i) {
            Dropout d;
            d.length = dropout_len(rng);
            std::uniform_int_distribution<std::size_t> start(0, n_samples - d.length);
            d.start = start(rng);
            model.dropouts.push_back(d);
        }
    }
    model.seed = rng();
    return model;
}

SensedRecord synth_record(const ClassSpec& spec, const RecordParams& rp,
                          const ChannelParams& c, const SensorParams& s,
                          const NoiseModel& noise, DistanceTag tag, Rng& rng) {
    const MotionParams motion = sample_class_params(spec, rp, rng);
    std::vector<double> samples = clean_voltage(motion, c, s);
    const std::size_t n = samples.size();

    const double dark_level = sensor_voltage(0.0, s);
    for (const Dropout& d : noise.dropouts) {
        const std::size_t end = std::min(d.start + d.length, n);
        for (std::size_t i = d.start; i < end; ++i) samples[i] = dark_level;
    }
    for (const Burst& b : noise.bursts) {
        const std::size_t end = std::min(b.start + b.length, n);
        for (std::size_t i = b.start; i < end; ++i) samples[i] += b.amplitude;
    }
    if (!noise.drift.empty()) {
        const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            samples[i] += polyval(noise.drift, static_cast<double>(i) / denom);
        }
    }
    if (noise.gaussian_sigma > 0.0) {
        Rng noise_rng(noise.seed);
        std::normal_distribution<double> gauss(0.0, noise.gaussian_sigma);
        for (double& v : samples) v += gauss(noise_rng);
    }

    SensedRecord record;
    record.samples = std::move(samples);
    record.timestamps.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        record.timestamps[i] = static_cast<double>(i) / rp.sample_rate_hz;
    }
    record.label = spec.label;
    record.distance = tag;
    return record;
}

LabeledDataset synth_dataset(const DatasetSpec& spec) {
    if (spec.records_per_class < 1) {
        throw std::invalid_argument("synth_dataset: records_per_class must be >= 1");
    }
    LabeledDataset out;
    out.sample_rate_hz = spec.record.sample_rate_hz;
    const std::size_t n_samples = static_cast<std::size_t>(
        std::llround(spec.record.duration_s * spec.record.sample_rate_hz));

    for (std::size_t di = 0; di < spec.distances.size(); ++di) {
        const auto& per = spec.distances[di];
        ChannelParams channel = spec.channel;
        channel.distance_m = per.distance_m;
        const double swing = full_depth_swing(channel, spec.sensor);

        // Standstill noise-only record for the SNR reference.
        {
            constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
            Rng rng(mix_seed(spec.seed, di, kNoiseStream));
            NoiseModel nm = make_noise_model(per.noise, false, n_samples, swing, rng);
            ClassSpec still = class_table()[1];  // apnea geometry: no motion
            SensedRecord rec =
                synth_record(still, spec.record, channel, spec.sensor, nm, per.tag, rng);
            out.noise_traces.emplace_back(per.tag, std::move(rec.samples));
        }

        for (int label = 0; label < kNumClasses; ++label) {
            const ClassSpec& cls = class_table()[label];
            for (int i = 0; i < spec.records_per_class; ++i) {
                Rng rng(mix_seed(spec.seed, di, static_cast<std::uint64_t>(label),
                                 static_cast<std::uint64_t>(i)));
                NoiseModel nm =
                    make_noise_model(per.noise, label == kFaultyLabel, n_samples, swing, rng);
                out.records.push_back(
                    synth_record(cls, spec.record, channel, spec.sensor, nm, per.tag, rng));
            }
        }
    }
    return out;
}

}  // namespace respilab::synth
