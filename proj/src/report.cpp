#include "l2v/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace l2v::report {

namespace {

constexpr double kWidth = 480.0;
constexpr double kHeight = 360.0;
constexpr double kMargin = 48.0;

std::string fixed2(double x) {
    if (x == 0.0) x = 0.0;  // no "-0.00"
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    std::string s(buf);
    return s == "-0.00" ? "0.00" : s;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string svg_open(std::string_view title) {
    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed2(kWidth) +
         "\" height=\"" + fixed2(kHeight) + "\" viewBox=\"0 0 " + fixed2(kWidth) + " " + fixed2(kHeight) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + fixed2(kWidth) + "\" height=\"" + fixed2(kHeight) +
         "\" fill=\"white\"/>\n";
    s += "<text x=\"" + fixed2(kWidth / 2) + "\" y=\"24.00\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\">" + xml_escape(title) + "</text>\n";
    return s;
}

std::string axes() {
    const double x0 = kMargin, y0 = kHeight - kMargin, x1 = kWidth - kMargin, y1 = kMargin;
    return "<line x1=\"" + fixed2(x0) + "\" y1=\"" + fixed2(y0) + "\" x2=\"" + fixed2(x1) + "\" y2=\"" + fixed2(y0) +
           "\" stroke=\"black\"/>\n<line x1=\"" + fixed2(x0) + "\" y1=\"" + fixed2(y0) + "\" x2=\"" + fixed2(x0) +
           "\" y2=\"" + fixed2(y1) + "\" stroke=\"black\"/>\n";
}

// Maps [lo, hi] onto [0, 1]; a flat range maps to the middle.
double unit(double x, double lo, double hi) {
    if (hi - lo <= 0.0) return 0.5;
    return (x - lo) / (hi - lo);
}

}  // namespace

std::string format_number(double x) {
    if (x == 0.0) return "0";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string projections_csv(const Matrix& projections, std::string_view role) {
    std::string out = "sample_id";
    for (std::size_t j = 0; j < projections.cols(); ++j) out += ",pc" + std::to_string(j + 1);
    out += ",role\n";
    for (std::size_t r = 0; r < projections.rows(); ++r) {
        out += std::to_string(r);
        for (double x : projections.row(r)) out += "," + format_number(x);
        out += ",";
        out += role;
        out += "\n";
    }
    return out;
}

std::string band_profile_csv(const spectral::BandProfile& profile) {
    std::string out = "band_index,label,energy\n";
    for (std::size_t b = 0; b < profile.n_bands(); ++b) {
        out += std::to_string(b) + "," + spectral::band_label(b) + "," + format_number(profile.energies[b]) + "\n";
    }
    return out;
}

std::string band_error_csv(const spectral::BandProfile& a, const spectral::BandProfile& b,
                           std::span<const double> relative_error) {
    std::string out = "band_index,label,freq_lo,freq_hi,energy_a,energy_b,relative_error\n";
    for (std::size_t i = 0; i < relative_error.size(); ++i) {
        out += std::to_string(i) + "," + spectral::band_label(i) + "," + std::to_string(a.ranges[i].first) + "," +
               std::to_string(a.ranges[i].second) + "," + format_number(a.energies[i]) + "," +
               format_number(b.energies[i]) + "," + format_number(relative_error[i]) + "\n";
    }
    return out;
}

std::string logits_csv(const std::vector<std::pair<std::string, std::vector<double>>>& runs) {
    std::string out = "run";
    const std::size_t width = runs.empty() ? 0 : runs.front().second.size();
    for (std::size_t t = 0; t < width; ++t) out += ",logit_" + std::to_string(t);
    out += "\n";
    for (const auto& [name, logits] : runs) {
        out += name;
        for (double x : logits) out += "," + format_number(x);
        out += "\n";
    }
    return out;
}

std::string spectrum_csv(const spectral::Spectrum& s, std::span<const std::uint8_t> mask) {
    std::string out = "index,mask,re,im\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int m = i < mask.size() ? mask[i] : 1;
        out += std::to_string(i) + "," + std::to_string(m) + "," + format_number(s.bins[i].real()) + "," +
               format_number(s.bins[i].imag()) + "\n";
    }
    return out;
}

std::string scatter_svg(const Matrix& projections, std::string_view title) {
    double xlo = 0, xhi = 0, ylo = 0, yhi = 0;
    for (std::size_t r = 0; r < projections.rows(); ++r) {
        const double x = projections(r, 0);
        const double y = projections.cols() > 1 ? projections(r, 1) : 0.0;
        if (r == 0) {
            xlo = xhi = x;
            ylo = yhi = y;
        }
        xlo = std::min(xlo, x), xhi = std::max(xhi, x);
        ylo = std::min(ylo, y), yhi = std::max(yhi, y);
    }
    std::string s = svg_open(title) + axes();
    const double span_x = kWidth - 2 * kMargin, span_y = kHeight - 2 * kMargin;
    for (std::size_t r = 0; r < projections.rows(); ++r) {
        const double x = projections(r, 0);
        const double y = projections.cols() > 1 ? projections(r, 1) : 0.0;
        const double px = kMargin + unit(x, xlo, xhi) * span_x;
        const double py = kHeight - kMargin - unit(y, ylo, yhi) * span_y;
        s += "<circle cx=\"" + fixed2(px) + "\" cy=\"" + fixed2(py) + "\" r=\"3\" fill=\"steelblue\" "
             "fill-opacity=\"0.7\"/>\n";
    }
    s += "<text x=\"" + fixed2(kWidth / 2) + "\" y=\"" + fixed2(kHeight - 12) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">PC1</text>\n";
    s += "<text x=\"14.00\" y=\"" + fixed2(kHeight / 2) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14.00 " +
         fixed2(kHeight / 2) + ")\">PC2</text>\n";
    s += "</svg>\n";
    return s;
}

std::string band_error_svg(std::span<const double> relative_error, std::string_view title) {
    double top = 0.0;
    for (double e : relative_error) top = std::max(top, e);
    if (top <= 0.0) top = 1.0;
    std::string s = svg_open(title) + axes();
    const std::size_t n = relative_error.size();
    const double span_x = kWidth - 2 * kMargin, span_y = kHeight - 2 * kMargin;
    const double slot = span_x / static_cast<double>(std::max<std::size_t>(n, 1));
    for (std::size_t i = 0; i < n; ++i) {
        const double h = relative_error[i] / top * span_y;
        const double x = kMargin + slot * static_cast<double>(i) + slot * 0.15;
        s += "<rect x=\"" + fixed2(x) + "\" y=\"" + fixed2(kHeight - kMargin - h) + "\" width=\"" +
             fixed2(slot * 0.7) + "\" height=\"" + fixed2(h) + "\" fill=\"" + (i == 0 ? "seagreen" : "indianred") +
             "\"/>\n";
        s += "<text x=\"" + fixed2(x + slot * 0.35) + "\" y=\"" + fixed2(kHeight - kMargin + 16) +
             "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" +
             xml_escape(spectral::band_label(i)) + "</text>\n";
    }
    s += "<text x=\"" + fixed2(kMargin) + "\" y=\"" + fixed2(kMargin - 6) +
         "\" font-family=\"sans-serif\" font-size=\"10\">max " + xml_escape(format_number(top)) + "</text>\n";
    s += "</svg>\n";
    return s;
}

}  // namespace l2v::report
