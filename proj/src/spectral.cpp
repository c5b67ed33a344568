#include "l2v/spectral.hpp"

#include <cmath>
#include <numeric>

#include "l2v/error.hpp"

namespace l2v::spectral {

namespace {

void require_finite(std::span<const double> v, const char* op) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
            fail(ErrorKind::format, std::string(op) + ": non-finite value at index " + std::to_string(i));
        }
    }
}

void require_cutoff(std::size_t d, std::size_t k, const char* op) {
    if (k < 1 || k > d) {
        fail(ErrorKind::usage, std::string(op) + ": cutoff k=" + std::to_string(k) +
                                   " outside [1, " + std::to_string(d) + "]");
    }
}

void apply_mask(Spectrum& s, std::size_t k) {
    const auto mask = lowpass_mask(s.size(), k);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!mask[i]) s.bins[i] = cplx{};
    }
}

}  // namespace

Spectrum dft_forward(std::span<const double> v) {
    if (v.empty()) fail(ErrorKind::dimension, "dft_forward: empty vector");
    require_finite(v, "dft_forward");
    std::vector<cplx> in(v.begin(), v.end());
    Spectrum s;
    s.bins.resize(v.size());
    FftPlan::get(v.size())->forward(in, s.bins);
    return s;
}

std::vector<double> dft_inverse(const Spectrum& s) {
    if (s.bins.empty()) fail(ErrorKind::dimension, "dft_inverse: empty spectrum");
    std::vector<cplx> out(s.size());
    FftPlan::get(s.size())->backward(s.bins, out);
    const double scale = 1.0 / static_cast<double>(s.size());
    std::vector<double> re(s.size());
    for (std::size_t t = 0; t < s.size(); ++t) re[t] = out[t].real() * scale;
    return re;
}

std::vector<std::uint8_t> lowpass_mask(std::size_t d, std::size_t k) {
    require_cutoff(d, k, "lowpass_mask");
    // i < k/2 or i > d - k/2, kept in integers.
    std::vector<std::uint8_t> mask(d, 0);
    for (std::size_t i = 0; i < d; ++i) {
        mask[i] = (2 * i < k || 2 * i > 2 * d - k) ? 1 : 0;
    }
    return mask;
}

std::vector<double> lowpass_filter(std::span<const double> v, std::size_t k) {
    require_cutoff(v.size(), k, "lowpass_filter");
    auto s = dft_forward(v);
    apply_mask(s, k);
    return dft_inverse(s);
}

Spectrum relocate_bins(const Spectrum& s, std::size_t d_target) {
    if (d_target < 1) fail(ErrorKind::usage, "spectral_resample: d_target must be >= 1");
    const std::size_t d = s.size();
    Spectrum out;
    out.bins.assign(d_target, cplx{});
    const double scale = static_cast<double>(d_target) / static_cast<double>(d);

    for (std::size_t i = 0; i < d; ++i) {
        const cplx value = s.bins[i] * scale;
        if (2 * i == d) {
            // Source Nyquist: split across the conjugate pair when the target has room,
            // fold onto the target Nyquist when it lands exactly there, else drop.
            const std::size_t f = d / 2;
            if (2 * f < d_target) {
                out.bins[f] += 0.5 * value;
                out.bins[d_target - f] += 0.5 * value;
            } else if (2 * f == d_target) {
                out.bins[f] += value;
            }
            continue;
        }
        const bool negative = 2 * i > d;
        const std::size_t f = negative ? d - i : i;
        if (2 * f < d_target) {
            out.bins[negative ? d_target - f : f] += value;
        } else if (2 * f == d_target) {
            out.bins[f] += value;
        }
    }
    return out;
}

std::vector<double> spectral_resample(std::span<const double> v, std::size_t d_target, std::size_t k) {
    if (d_target < 1) fail(ErrorKind::usage, "spectral_resample: d_target must be >= 1");
    if (k < 1 || k > v.size() || k > d_target) {
        fail(ErrorKind::usage, "spectral_resample: cutoff k=" + std::to_string(k) +
                                   " exceeds min(d, d_target)=" +
                                   std::to_string(std::min(v.size(), d_target)));
    }
    auto s = dft_forward(v);
    apply_mask(s, k);
    return dft_inverse(relocate_bins(s, d_target));
}

std::vector<double> spectral_resample_unmasked(std::span<const double> v, std::size_t d_target) {
    return dft_inverse(relocate_bins(dft_forward(v), d_target));
}

double BandProfile::total() const {
    return std::accumulate(energies.begin(), energies.end(), 0.0);
}

std::string band_label(std::size_t band_index) {
    if (band_index == 0) return "DC&Low";
    return "Band " + std::to_string(band_index + 1);
}

std::size_t max_bands(std::size_t d) { return d / 2 + 1; }

BandProfile band_energies(std::span<const double> v, std::size_t n_bands) {
    const std::size_t d = v.size();
    if (d == 0) fail(ErrorKind::dimension, "band_energies: empty vector");
    if (n_bands < 1 || n_bands > max_bands(d)) {
        fail(ErrorKind::usage, "band_energies: n_bands=" + std::to_string(n_bands) +
                                   " outside [1, " + std::to_string(max_bands(d)) + "]");
    }
    const auto s = dft_forward(v);
    const std::size_t n_freqs = d / 2 + 1;
    const std::size_t width = n_freqs / n_bands;

    BandProfile profile;
    profile.energies.assign(n_bands, 0.0);
    for (std::size_t b = 0; b < n_bands; ++b) {
        const std::size_t first = b * width;
        const std::size_t last = (b + 1 == n_bands) ? n_freqs - 1 : first + width - 1;
        profile.ranges.emplace_back(first, last);
    }
    for (std::size_t f = 0; f < n_freqs; ++f) {
        const std::size_t band = std::min(f / width, n_bands - 1);
        double e = std::norm(s.bins[f]);
        // Conjugate partner counted here; DC and Nyquist have none.
        if (f != 0 && 2 * f != d) e += std::norm(s.bins[d - f]);
        profile.energies[band] += e;
    }
    return profile;
}

std::vector<double> band_relative_error(std::span<const double> a, std::span<const double> b,
                                        std::size_t n_bands) {
    if (a.size() != b.size()) {
        fail(ErrorKind::dimension, "band_relative_error: lengths " + std::to_string(a.size()) +
                                       " and " + std::to_string(b.size()) + " differ");
    }
    const auto ea = band_energies(a, n_bands);
    const auto eb = band_energies(b, n_bands);
    std::vector<double> out(n_bands);
    for (std::size_t i = 0; i < n_bands; ++i) {
        out[i] = std::abs(ea.energies[i] - eb.energies[i]) / std::max(eb.energies[i], kRelativeErrorFloor);
    }
    return out;
}

}  // namespace l2v::spectral
