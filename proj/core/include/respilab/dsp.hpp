#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace respilab::dsp {

/// A uniformly sampled voltage trace.
struct Trace {
    std::vector<double> values;
    double sample_rate = 100.0;  // Hz

    std::size_t size() const { return values.size(); }
};

/// One-sided magnitude spectrum of a real trace (bins 0..L/2).
struct Spectrum {
    std::vector<double> magnitudes;
    double sample_rate = 100.0;
    std::size_t length = 0;  // sample count of the source trace

    // BPM covered by one bin (60 s at 100 Hz -> 1 BPM per bin).
    double bin_to_bpm() const { return 60.0 * sample_rate / static_cast<double>(length); }
};

// Forward k-point moving average. Windows that would run past the end
// shrink to the remaining points, so the output length equals the input
// length. Throws std::invalid_argument when k < 1 or k > len(x).
std::vector<double> moving_average(std::span<const double> x, std::size_t k);
Trace moving_average(const Trace& x, std::size_t k);

struct DetrendResult {
    std::vector<double> residual;      // input minus fitted trend
    std::vector<double> coefficients;  // descending powers of the normalized index
};

// Least-squares polynomial detrend of the given order. The polynomial is
// fitted over the normalized sample index n/(L-1) in [0,1]; order 0 is
// mean subtraction. Throws std::invalid_argument when order < 0 or the
// trace has too few samples for the fit.
DetrendResult polyfit_detrend(std::span<const double> y, int order);

// One-sided DFT magnitudes |Z[k]| for k = 0..L/2.
Spectrum dft_magnitudes(const Trace& z);

struct PeakBin {
    std::size_t bin = 0;
    double magnitude = 0.0;
};

/// Inclusive bin interval searched for the spectral peak. The DC bin is
/// never part of the search.
struct BinRange {
    std::size_t lo = 1;
    std::size_t hi = 100;
};

// Argmax of the magnitudes over the range (clamped to the spectrum size);
// ties resolve to the lowest bin. Throws std::invalid_argument when the
// range is empty or includes bin 0.
PeakBin peak_bin(const Spectrum& s, BinRange range = {});

}  // namespace respilab::dsp
