// Independent reference implementations used only by tests. These must
// stay decoupled from the library code paths they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

namespace oracles {

// Direct O(L^2) DFT magnitude computation, one-sided bins 0..L/2.
inline std::vector<double> naive_dft_magnitudes(const std::vector<double>& z) {
    const std::size_t n = z.size();
    std::vector<double> mags(n / 2 + 1);
    for (std::size_t k = 0; k < mags.size(); ++k) {
        double re = 0.0;
        double im = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) *
                                 static_cast<double>(i) / static_cast<double>(n);
            re += z[i] * std::cos(angle);
            im += z[i] * std::sin(angle);
        }
        mags[k] = std::sqrt(re * re + im * im);
    }
    return mags;
}

// Least-squares fit via an explicitly orthogonalized monomial basis
// (modified Gram-Schmidt over the normalized sample index).
inline std::vector<double> orthogonal_basis_residual(const std::vector<double>& y, int order) {
    const std::size_t n = y.size();
    std::vector<std::vector<double>> basis;
    for (int j = 0; j <= order; ++j) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
            v[i] = std::pow(u, j);
        }
        for (const auto& b : basis) {
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += v[i] * b[i];
            for (std::size_t i = 0; i < n; ++i) v[i] -= dot * b[i];
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        if (norm > 1e-12) {
            for (double& x : v) x /= norm;
            basis.push_back(std::move(v));
        }
    }
    std::vector<double> residual = y;
    for (const auto& b : basis) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += residual[i] * b[i];
        for (std::size_t i = 0; i < n; ++i) residual[i] -= dot * b[i];
    }
    return residual;
}

struct SplitOracleResult {
    int feature = -1;
    double threshold = 0.0;
    double quality = 0.0;
};

// Exhaustive best-split search: every midpoint between consecutive
// distinct sorted values of every feature, weighted Gini of the induced
// partition, ties to the lowest feature then the lowest threshold.
inline std::optional<SplitOracleResult> exhaustive_best_split(
    const std::vector<std::vector<double>>& x, const std::vector<int>& y) {
    const std::size_t n = y.size();
    if (n < 2) return std::nullopt;
    const std::size_t p = x.front().size();
    int n_classes = 0;
    for (int label : y) n_classes = std::max(n_classes, label + 1);

    auto gini_of = [&](const std::vector<int>& counts, double total) {
        double sum_sq = 0.0;
        for (int c : counts) {
            const double prob = static_cast<double>(c) / total;
            sum_sq += prob * prob;
        }
        return 1.0 - sum_sq;
    };

    std::optional<SplitOracleResult> best;
    for (std::size_t j = 0; j < p; ++j) {
        std::set<double> distinct;
        for (std::size_t i = 0; i < n; ++i) distinct.insert(x[i][j]);
        std::vector<double> sorted(distinct.begin(), distinct.end());
        for (std::size_t v = 0; v + 1 < sorted.size(); ++v) {
            const double threshold = sorted[v] + (sorted[v + 1] - sorted[v]) / 2.0;
            std::vector<int> left(n_classes, 0), right(n_classes, 0);
            double n_left = 0.0, n_right = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (x[i][j] <= threshold) {
                    ++left[y[i]];
                    n_left += 1.0;
                } else {
                    ++right[y[i]];
                    n_right += 1.0;
                }
            }
            if (n_left == 0.0 || n_right == 0.0) continue;
            const double quality = (n_left / (n_left + n_right)) * gini_of(left, n_left) +
                                   (n_right / (n_left + n_right)) * gini_of(right, n_right);
            if (!best || quality < best->quality) {
                best = SplitOracleResult{static_cast<int>(j), threshold, quality};
            }
        }
    }
    return best;
}

inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const auto n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - ma) * (b[i] - mb);
        va += (a[i] - ma) * (a[i] - ma);
        vb += (b[i] - mb) * (b[i] - mb);
    }
    return cov / std::sqrt(va * vb);
}

}  // namespace oracles
