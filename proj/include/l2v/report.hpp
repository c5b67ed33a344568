#pragma once

// CSV and SVG emitters for analysis artifacts. Output is byte-deterministic:
// numbers in CSV use the shortest round-trip decimal form, SVG coordinates
// are fixed to two decimals.

#include <span>
#include <string>
#include <vector>

#include "l2v/matrix.hpp"
#include "l2v/spectral.hpp"

namespace l2v::report {

std::string format_number(double x);

/// Columns sample_id, pc1..pcm, role.
std::string projections_csv(const Matrix& projections, std::string_view role);

/// Columns band_index, label, energy.
std::string band_profile_csv(const spectral::BandProfile& profile);

/// Columns band_index, label, freq_lo, freq_hi, energy_a, energy_b, relative_error.
std::string band_error_csv(const spectral::BandProfile& a, const spectral::BandProfile& b,
                           std::span<const double> relative_error);

/// One row per named logit vector: run, logit_0..logit_{V-1}.
std::string logits_csv(const std::vector<std::pair<std::string, std::vector<double>>>& runs);

/// Columns index, mask, re, im.
std::string spectrum_csv(const spectral::Spectrum& s, std::span<const std::uint8_t> mask);

/// Scatter of the first two projection columns (second axis zero when m = 1).
std::string scatter_svg(const Matrix& projections, std::string_view title);

/// Bar chart of per-band relative error, "DC&Low" first.
std::string band_error_svg(std::span<const double> relative_error, std::string_view title);

}  // namespace l2v::report
