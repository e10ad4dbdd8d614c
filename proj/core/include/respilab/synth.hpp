#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "respilab/rng.hpp"

namespace respilab::synth {

inline constexpr double kFullDepthMm = 30.0;  // 100% breathing depth

/// Chest waveform shape: |sin| for exponent 1, else sin^n with even n.
struct BreathingPattern {
    int exponent = 6;  // one of {1, 2, 4, 6}
};

bool pattern_supported(int exponent);

/// One row of the breathing-class table: label, name and the admissible
/// rate/depth ranges used when sampling records of that class.
struct ClassSpec {
    int label = 0;
    std::string name;
    double rate_min_bpm = 0.0;
    double rate_max_bpm = 0.0;
    double depth_min_pct = 0.0;
    double depth_max_pct = 0.0;
};

inline constexpr int kNumClasses = 8;
inline constexpr int kFaultyLabel = 7;

// The eight breathing classes (eupnea, apnea, tachypnea, bradypnea,
// hyperpnea, hypopnea, Kussmaul's, faulty data).
const std::array<ClassSpec, kNumClasses>& class_table();

struct MotionParams {
    double rate_bpm = 0.0;     // [0, 50]
    double depth_pct = 0.0;    // [0, 100], 100% = 30 mm travel
    double offset_mm = 0.0;    // initial chest position
    double duration_s = 60.0;
    double sample_rate_hz = 100.0;
    BreathingPattern pattern{};
};

// Chest position in mm over time:
//   offset + depth * 30mm * sin^n(pi * f * t),  f = rate/60.
// Rate 0 yields a constant trace at the offset. Throws
// std::invalid_argument for unsupported exponents or out-of-range params.
std::vector<double> chest_motion(const MotionParams& p);

/// Point-source optical channel with Lambertian emission.
struct ChannelParams {
    double transmit_power = 1.0;          // arbitrary power units
    double intercept_area = 1e-4;         // m^2
    double distance_m = 1.0;
    double path_loss_exponent = 2.0;
    double irradiance_angle_rad = 0.0;
    double incidence_angle_rad = 0.0;
    double half_angle_rad = std::numbers::pi / 3.0;  // half-power angle

    // Emission order implied by the half-power angle.
    double lambert_order() const;
};

// Received optical power at the configured distance; zero outside the
// field of view (incidence angle >= half angle).
double lambertian_power(const ChannelParams& c);

/// Photodetector plus lock-in output scaling. The chest-to-power coupling
/// is a linear reflectance map over chest travel.
struct SensorParams {
    double responsivity = 0.5;            // A/W
    double dark_current = 1e-9;           // A
    double transimpedance_gain = 1.51e3;  // V/A
    double lockin_ref_amplitude = 1.0;    // V
    double full_scale = 10.0;             // V
    double sensitivity = 1.0;             // V, > 0
    double reflect_base = 0.5;            // scattered fraction at 0 mm
    double reflect_slope_per_mm = 0.005;  // added fraction per mm of travel
};

// Scaled lock-in output for a given received power. Throws
// std::invalid_argument when sensitivity <= 0 or received power < 0.
double sensor_voltage(double received_power, const SensorParams& s);

struct Burst {
    std::size_t start = 0;
    std::size_t length = 0;
    double amplitude = 0.0;  // V, added over the segment
};

struct Dropout {
    std::size_t start = 0;
    std::size_t length = 0;  // segment clamped to the dark-current level
};

/// Concrete per-record disturbance description. With sigma 0, no drift,
/// no bursts and no dropouts the record equals the clean trace exactly.
struct NoiseModel {
    double gaussian_sigma = 0.0;       // V per sample
    std::vector<double> drift;         // polynomial, descending powers of n/(L-1)
    std::vector<Burst> bursts;
    std::vector<Dropout> dropouts;
    std::uint64_t seed = 0;
};

/// Calibration knobs for one sensing distance.
struct NoisePreset {
    double sigma = 0.0;            // V
    double drift_amplitude = 0.0;  // V, bound on drift polynomial coefficients
};

enum class DistanceTag { near, mid, far };

std::string to_string(DistanceTag tag);
DistanceTag distance_tag_from_string(const std::string& s);  // throws on unknown tag

struct SensedRecord {
    std::vector<double> samples;     // V
    std::vector<double> timestamps;  // s, uniform, strictly increasing
    int label = 0;
    DistanceTag distance = DistanceTag::near;
};

/// Record-level generation settings shared by all classes.
struct RecordParams {
    BreathingPattern pattern{};
    double duration_s = 60.0;
    double sample_rate_hz = 100.0;
    double offset_mm = 0.0;
};

// Uniform rate/depth draw inside the class ranges; rates are integral BPM
// so a 60 s window puts the true frequency exactly on a DFT bin.
MotionParams sample_class_params(const ClassSpec& spec, const RecordParams& rp, Rng& rng);

// Noise-free voltage trace for the given motion through the channel and
// sensor chain.
std::vector<double> clean_voltage(const MotionParams& m, const ChannelParams& c,
                                  const SensorParams& s);

// Peak-to-peak voltage a full-depth breath produces at this geometry.
// Burst amplitudes for faulty records are scaled against it.
double full_depth_swing(const ChannelParams& c, const SensorParams& s);

// Draws a concrete NoiseModel from a distance preset: random drift
// polynomial of order <= 5, plus bursts and line-of-sight dropouts when
// the record is faulty.
NoiseModel make_noise_model(const NoisePreset& preset, bool faulty, std::size_t n_samples,
                            double signal_scale, Rng& rng);

// Samples class motion, runs the optical/sensor chain and applies the
// noise model. Deterministic for a fixed (params, rng state, model seed).
SensedRecord synth_record(const ClassSpec& spec, const RecordParams& rp,
                          const ChannelParams& c, const SensorParams& s,
                          const NoiseModel& noise, DistanceTag tag, Rng& rng);

/// Generation plan for a labeled dataset across one or more distances.
struct DatasetSpec {
    RecordParams record{};
    ChannelParams channel{};  // distance_m is overwritten per entry below
    SensorParams sensor{};

    struct PerDistance {
        DistanceTag tag = DistanceTag::near;
        double distance_m = 0.5;
        NoisePreset noise{};
    };
    std::vector<PerDistance> distances;

    int records_per_class = 50;
    std::uint64_t seed = 42;
};

struct LabeledDataset {
    std::vector<SensedRecord> records;
    // One standstill noise-only trace per distance, for SNR references.
    std::vector<std::pair<DistanceTag, std::vector<double>>> noise_traces;
    double sample_rate_hz = 100.0;
};

// Emits records_per_class records for each of the 8 classes at every
// configured distance, plus one noise-only record per distance. Record
// RNG streams are derived from the master seed, so generation is
// deterministic and order-independent.
LabeledDataset synth_dataset(const DatasetSpec& spec);

}  // namespace respilab::synth
