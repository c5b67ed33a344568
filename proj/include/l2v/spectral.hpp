#pragma once

// Frequency-domain machinery for pattern vectors: forward/inverse DFT, the
// symmetric low-pass mask, low-pass filtering, frequency-domain resampling
// between hidden sizes, and per-band energy profiles.
//
// Conventions:
//   * forward transform is unnormalized, inverse carries 1/d;
//   * bins are in standard DFT order: bin 0 is DC, bin j and bin d-j hold the
//     conjugate pair of frequency j, bin d/2 is Nyquist for even d;
//   * the mask keeps bin i iff 2i < k or 2i > 2d - k. For even k this is DC plus
//     k/2 - 1 conjugate pairs, i.e. k - 1 bins, and bin d/2 is never kept.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "l2v/fft.hpp"

namespace l2v::spectral {

struct Spectrum {
    std::vector<cplx> bins;

    std::size_t size() const noexcept { return bins.size(); }
};

Spectrum dft_forward(std::span<const double> v);

/// Real part of the 1/d inverse transform; any imaginary residue is dropped.
std::vector<double> dft_inverse(const Spectrum& s);

std::vector<std::uint8_t> lowpass_mask(std::size_t d, std::size_t k);

/// Re[IFFT(M_k * FFT(v))].
std::vector<double> lowpass_filter(std::span<const double> v, std::size_t k);

/// Low-pass at cutoff k, then move the retained bins into a spectrum of
/// length d_target and invert. Values are scaled by d_target/d so a retained
/// sinusoid keeps its time-domain amplitude.
std::vector<double> spectral_resample(std::span<const double> v, std::size_t d_target, std::size_t k);

/// Same relocation without any mask: every frequency representable at
/// d_target is carried over, higher ones are dropped. Used by the filter
/// bypass path.
std::vector<double> spectral_resample_unmasked(std::span<const double> v, std::size_t d_target);

/// Bin relocation with d_target/d scaling; input spectrum is left as-is.
Spectrum relocate_bins(const Spectrum& s, std::size_t d_target);

struct BandProfile {
    std::vector<double> energies;
    /// Inclusive [first, last] symmetric-frequency range of each band.
    std::vector<std::pair<std::size_t, std::size_t>> ranges;

    std::size_t n_bands() const noexcept { return energies.size(); }
    double total() const;
};

std::string band_label(std::size_t band_index);

/// Largest allowed band count for length d: one band per symmetric frequency 0..floor(d/2).
std::size_t max_bands(std::size_t d);

BandProfile band_energies(std::span<const double> v, std::size_t n_bands);

inline constexpr double kRelativeErrorFloor = 1e-12;

/// Per band |E_a - E_b| / max(E_b, 1e-12); b is the reference.
std::vector<double> band_relative_error(std::span<const double> a, std::span<const double> b,
                                        std::size_t n_bands);

}  // namespace l2v::spectral
