#include "respilab/dsp.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace respilab::dsp {

std::vector<double> moving_average(std::span<const double> x, std::size_t k) {
    if (k < 1 || k > x.size()) {
        throw std::invalid_argument("moving_average: window must satisfy 1 <= k <= len");
    }
    const std::size_t n = x.size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t window = std::min(k, n - i);
        double sum = 0.0;
        for (std::size_t j = i; j < i + window; ++j) sum += x[j];
        out[i] = sum / static_cast<double>(window);
    }
    return out;
}

Trace moving_average(const Trace& x, std::size_t k) {
    return Trace{moving_average(std::span<const double>(x.values), k), x.sample_rate};
}

DetrendResult polyfit_detrend(std::span<const double> y, int order) {
    if (order < 0) throw std::invalid_argument("polyfit_detrend: order must be >= 0");
    const auto n = static_cast<Eigen::Index>(y.size());
    if (n <= order) {
        throw std::invalid_argument("polyfit_detrend: trace too short for the fit order");
    }

    // Vandermonde over the normalized index keeps the fit well conditioned
    // at trace lengths in the thousands.
    Eigen::MatrixXd design(n, order + 1);
    const double denom = n > 1 ? static_cast<double>(n - 1) : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double u = static_cast<double>(i) / denom;
        double power = 1.0;
        for (int j = 0; j <= order; ++j) {
            design(i, j) = power;
            power *= u;
        }
    }
    Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
    Eigen::VectorXd coeff = design.colPivHouseholderQr().solve(rhs);
    Eigen::VectorXd trend = design * coeff;

    DetrendResult result;
    result.residual.resize(y.size());
    for (Eigen::Index i = 0; i < n; ++i) result.residual[i] = y[i] - trend(i);
    result.coefficients.resize(order + 1);
    for (int j = 0; j <= order; ++j) result.coefficients[j] = coeff(order - j);
    return result;
}

namespace {
// The FFTW planner is not thread safe; plan creation and destruction are
// serialized. Execution on private buffers is safe.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

Spectrum dft_magnitudes(const Trace& z) {
    const std::size_t n = z.values.size();
    if (n == 0) throw std::invalid_argument("dft_magnitudes: empty trace");

    const std::size_t bins = n / 2 + 1;
    double* in = fftw_alloc_real(n);
    fftw_complex* out = fftw_alloc_complex(bins);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    }
    std::copy(z.values.begin(), z.values.end(), in);
    fftw_execute(plan);

    Spectrum s;
    s.sample_rate = z.sample_rate;
    s.length = n;
    s.magnitudes.resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        s.magnitudes[k] = std::sqrt(out[k][0] * out[k][0] + out[k][1] * out[k][1]);
    }

    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return s;
}

PeakBin peak_bin(const Spectrum& s, BinRange range) {
    if (range.lo == 0) throw std::invalid_argument("peak_bin: the DC bin is excluded");
    const std::size_t hi = std::min(range.hi, s.magnitudes.size() - 1);
    if (s.magnitudes.size() < 2 || range.lo > hi) {
        throw std::invalid_argument("peak_bin: empty search range");
    }
    PeakBin best{range.lo, s.magnitudes[range.lo]};
    for (std::size_t k = range.lo + 1; k <= hi; ++k) {
        if (s.magnitudes[k] > best.magnitude) best = {k, s.magnitudes[k]};
    }
    return best;
}

}  // namespace respilab::dsp
