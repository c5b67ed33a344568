#pragma once

// Reference implementations used only by tests. None of these call into the
// library's FFT or PCA paths.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace l2v::oracle {

/// Direct O(d^2) forward DFT, angle reduced as (j * t mod d) before the trig call.
inline std::vector<std::complex<double>> naive_dft(const std::vector<double>& v) {
    const std::size_t d = v.size();
    std::vector<std::complex<double>> out(d);
    for (std::size_t j = 0; j < d; ++j) {
        long double re = 0.0L, im = 0.0L;
        for (std::size_t t = 0; t < d; ++t) {
            const long double angle =
                2.0L * std::numbers::pi_v<long double> * static_cast<long double>((j * t) % d) / d;
            re += v[t] * std::cos(angle);
            im -= v[t] * std::sin(angle);
        }
        out[j] = {static_cast<double>(re), static_cast<double>(im)};
    }
    return out;
}

/// Direct O(d^2) inverse DFT (with 1/d), real part.
inline std::vector<double> naive_idft_real(const std::vector<std::complex<double>>& s) {
    const std::size_t d = s.size();
    std::vector<double> out(d);
    for (std::size_t t = 0; t < d; ++t) {
        long double re = 0.0L;
        for (std::size_t j = 0; j < d; ++j) {
            const long double angle =
                2.0L * std::numbers::pi_v<long double> * static_cast<long double>((j * t) % d) / d;
            re += s[j].real() * std::cos(angle) - s[j].imag() * std::sin(angle);
        }
        out[t] = static_cast<double>(re / d);
    }
    return out;
}

/// The low-pass predicate evaluated with real-valued k/2.
inline bool mask_predicate(std::size_t i, std::size_t d, std::size_t k) {
    const double half = static_cast<double>(k) / 2.0;
    const double x = static_cast<double>(i);
    return x < half || x > static_cast<double>(d) - half;
}

/// Low-pass through the naive transforms.
inline std::vector<double> naive_lowpass(const std::vector<double>& v, std::size_t k) {
    auto s = naive_dft(v);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!mask_predicate(i, s.size(), k)) s[i] = 0.0;
    }
    return naive_idft_real(s);
}

/// Trace of the explicitly formed d x d covariance (1/n normalization).
inline double explicit_covariance_trace(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size(), d = rows.front().size();
    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t c = 0; c < d; ++c) mean[c] += r[c] / static_cast<double>(n);
    std::vector<double> cov(d * d, 0.0);
    for (const auto& r : rows)
        for (std::size_t a = 0; a < d; ++a)
            for (std::size_t b = 0; b < d; ++b)
                cov[a * d + b] += (r[a] - mean[a]) * (r[b] - mean[b]) / static_cast<double>(n);
    double tr = 0.0;
    for (std::size_t a = 0; a < d; ++a) tr += cov[a * d + a];
    return tr;
}

/// Eigenvalues of a symmetric 2x2 [[a, b], [b, c]], descending.
inline std::pair<double, double> eig2(double a, double b, double c) {
    const double mid = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return {mid + rad, mid - rad};
}

struct Rng {
    explicit Rng(std::uint64_t seed) : engine(seed) {}

    double normal() { return gauss(engine); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine); }
    std::size_t index(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(engine);
    }
    std::vector<double> normals(std::size_t d) {
        std::vector<double> v(d);
        for (auto& x : v) x = normal();
        return v;
    }

    std::mt19937_64 engine;
    std::normal_distribution<double> gauss{0.0, 1.0};
};

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Zeroes the Nyquist bin of v (even length) through the naive transforms.
inline std::vector<double> strip_nyquist(const std::vector<double>& v) {
    if (v.size() % 2 != 0) return v;
    auto s = naive_dft(v);
    s[v.size() / 2] = 0.0;
    return naive_idft_real(s);
}

}  // namespace l2v::oracle
