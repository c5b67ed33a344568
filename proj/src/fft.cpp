#include "l2v/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "l2v/error.hpp"

namespace l2v::spectral {

namespace {

std::vector<std::size_t> factorize(std::size_t n) {
    std::vector<std::size_t> out;
    // Pull radix-4 first, then 2, then odd primes.
    while (n % 4 == 0) {
        out.push_back(4);
        n /= 4;
    }
    while (n % 2 == 0) {
        out.push_back(2);
        n /= 2;
    }
    for (std::size_t p = 3; p * p <= n; p += 2) {
        while (n % p == 0) {
            out.push_back(p);
            n /= p;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// exp(-2 pi i k / n) with k reduced so the angle stays in [0, 2 pi).
cplx unit_root(std::size_t k, std::size_t n) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k % n) / static_cast<double>(n);
    return {std::cos(angle), std::sin(angle)};
}

std::size_t next_pow2(std::size_t n) {
    std::size_t m = 1;
    while (m < n) m <<= 1;
    return m;
}

}  // namespace

struct FftPlan::Bluestein {
    explicit Bluestein(std::size_t n) : n(n), m(next_pow2(2 * n - 1)), inner(m) {
        chirp.resize(n);
        // exp(-i pi k^2 / n) = exp(-2 pi i (k^2 mod 2n) / 2n)
        for (std::size_t k = 0; k < n; ++k) chirp[k] = unit_root((k * k) % (2 * n), 2 * n);
        std::vector<cplx> kernel(m, cplx{});
        kernel[0] = std::conj(chirp[0]);
        for (std::size_t k = 1; k < n; ++k) {
            kernel[k] = std::conj(chirp[k]);
            kernel[m - k] = std::conj(chirp[k]);
        }
        kernel_hat.resize(m);
        inner.forward(kernel, kernel_hat);
    }

    void forward(std::span<const cplx> in, std::span<cplx> out) const {
        std::vector<cplx> a(m, cplx{});
        for (std::size_t k = 0; k < n; ++k) a[k] = in[k] * chirp[k];
        std::vector<cplx> a_hat(m);
        inner.forward(a, a_hat);
        for (std::size_t j = 0; j < m; ++j) a_hat[j] *= kernel_hat[j];
        inner.backward(a_hat, a);
        const double scale = 1.0 / static_cast<double>(m);
        for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * scale * chirp[k];
    }

    std::size_t n;
    std::size_t m;
    FftPlan inner;
    std::vector<cplx> chirp;
    std::vector<cplx> kernel_hat;
};

FftPlan::FftPlan(std::size_t n) : n_(n) {
    if (n == 0) fail(ErrorKind::usage, "FFT length must be >= 1");
    factors_ = factorize(n);
    if (!factors_.empty() && factors_.back() > kMaxDirectRadix) {
        bluestein_ = std::make_unique<Bluestein>(n);
        return;
    }
    twiddles_.resize(n);
    for (std::size_t k = 0; k < n; ++k) twiddles_[k] = unit_root(k, n);
}

FftPlan::~FftPlan() = default;

void FftPlan::recurse(const cplx* in, std::size_t in_stride, cplx* out, std::size_t n,
                      std::size_t factor_index) const {
    if (n == 1) {
        out[0] = in[0];
        return;
    }
    const std::size_t p = factors_[factor_index];
    const std::size_t m = n / p;
    for (std::size_t r = 0; r < p; ++r) {
        recurse(in + r * in_stride, in_stride * p, out + r * m, m, factor_index + 1);
    }
    // Twiddle index step for this level: W_n^e = twiddles_[e * (n_ / n)].
    const std::size_t step = n_ / n;
    if (p == 2) {
        for (std::size_t k = 0; k < m; ++k) {
            const cplx a = out[k];
            const cplx b = out[m + k] * twiddles_[k * step];
            out[k] = a + b;
            out[m + k] = a - b;
        }
        return;
    }
    if (p == 4) {
        for (std::size_t k = 0; k < m; ++k) {
            const cplx y0 = out[k];
            const cplx y1 = out[m + k] * twiddles_[k * step];
            const cplx y2 = out[2 * m + k] * twiddles_[2 * k * step];
            const cplx y3 = out[3 * m + k] * twiddles_[3 * k * step];
            const cplx s02 = y0 + y2, d02 = y0 - y2;
            const cplx s13 = y1 + y3, d13 = y1 - y3;
            const cplx d13_mi{d13.imag(), -d13.real()};  // -i * d13
            out[k] = s02 + s13;
            out[m + k] = d02 + d13_mi;
            out[2 * m + k] = s02 - s13;
            out[3 * m + k] = d02 - d13_mi;
        }
        return;
    }
    std::vector<cplx> scratch(p);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t r = 0; r < p; ++r) scratch[r] = out[r * m + k] * twiddles_[(r * k * step) % n_];
        for (std::size_t q = 0; q < p; ++q) {
            cplx acc = scratch[0];
            for (std::size_t r = 1; r < p; ++r) acc += scratch[r] * twiddles_[((r * q) % p) * m * step];
            out[q * m + k] = acc;
        }
    }
}

void FftPlan::forward(std::span<const cplx> in, std::span<cplx> out) const {
    if (in.size() != n_ || out.size() != n_) {
        fail(ErrorKind::dimension, "FFT plan of length " + std::to_string(n_) +
                                       " applied to length " + std::to_string(in.size()));
    }
    if (bluestein_) {
        bluestein_->forward(in, out);
        return;
    }
    if (in.data() == out.data()) {
        std::vector<cplx> copy(in.begin(), in.end());
        recurse(copy.data(), 1, out.data(), n_, 0);
    } else {
        recurse(in.data(), 1, out.data(), n_, 0);
    }
}

void FftPlan::backward(std::span<const cplx> in, std::span<cplx> out) const {
    // conj(F(conj(x))) is the unnormalized inverse transform.
    std::vector<cplx> tmp(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) tmp[i] = std::conj(in[i]);
    forward(tmp, out);
    for (auto& z : out) z = std::conj(z);
}

std::shared_ptr<const FftPlan> FftPlan::get(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<const FftPlan>(n);
    return slot;
}

}  // namespace l2v::spectral
