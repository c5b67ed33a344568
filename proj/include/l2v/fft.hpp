#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace l2v::spectral {

using cplx = std::complex<double>;

/// Precomputed complex DFT of one length. Any length >= 1 is supported:
/// lengths whose prime factors are all <= kMaxDirectRadix use recursive
/// mixed-radix Cooley-Tukey, anything else goes through Bluestein's chirp-z
/// with a power-of-two inner transform.
///
/// Plans are immutable after construction and safe to share between threads.
class FftPlan {
public:
    static constexpr std::size_t kMaxDirectRadix = 31;

    explicit FftPlan(std::size_t n);
    ~FftPlan();
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::size_t size() const noexcept { return n_; }

    /// out[j] = sum_t in[t] exp(-2 pi i j t / n). No normalization.
    void forward(std::span<const cplx> in, std::span<cplx> out) const;
    /// out[t] = sum_j in[j] exp(+2 pi i j t / n). No normalization.
    void backward(std::span<const cplx> in, std::span<cplx> out) const;

    /// Shared plan for length n from a process-wide cache.
    static std::shared_ptr<const FftPlan> get(std::size_t n);

private:
    struct Bluestein;

    void recurse(const cplx* in, std::size_t in_stride, cplx* out, std::size_t n,
                 std::size_t factor_index) const;

    std::size_t n_;
    std::vector<std::size_t> factors_;
    std::vector<cplx> twiddles_;  // exp(-2 pi i k / n), k < n
    std::unique_ptr<Bluestein> bluestein_;
};

}  // namespace l2v::spectral
