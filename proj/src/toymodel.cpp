#include "l2v/toymodel.hpp"

#include <cmath>
#include <random>

#include "l2v/error.hpp"
#include "l2v/spectral.hpp"

namespace l2v::toy {

namespace {

double uniform_pm1(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0;
}

double softsign(double x) { return x / (1.0 + std::abs(x)); }

std::size_t passband_size(std::size_t d, std::size_t k) {
    const auto mask = spectral::lowpass_mask(d, k);
    std::size_t count = 0;
    for (auto bit : mask) count += bit;
    return count;
}

std::vector<double> gaussian(std::mt19937_64& rng, std::size_t d) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> out(d);
    for (auto& x : out) x = normal(rng);
    return out;
}

void validate(const SynthSpec& spec) {
    if (spec.n < 1 || spec.d < 2) fail(ErrorKind::usage, "synth: need n >= 1 and d >= 2");
    if (spec.k_signal < 1 || spec.k_signal >= spec.d) {
        fail(ErrorKind::usage, "synth: k_signal=" + std::to_string(spec.k_signal) +
                                   " must lie in [1, d)");
    }
    if (!(spec.signal_norm >= 0.0) || !(spec.noise_energy >= 0.0) || !(spec.residual_energy >= 0.0)) {
        fail(ErrorKind::usage, "synth: norms and energies must be nonnegative");
    }
}

}  // namespace

nlohmann::json ToyConfig::to_json() const {
    return {{"n_layers", n_layers}, {"d_hidden", d_hidden}, {"vocab", vocab}, {"seed", seed}};
}

ToyConfig ToyConfig::from_json(const nlohmann::json& j) {
    ToyConfig c;
    try {
        c.n_layers = j.at("n_layers").get<std::size_t>();
        c.d_hidden = j.at("d_hidden").get<std::size_t>();
        c.vocab = j.at("vocab").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::usage, std::string("toy config: ") + e.what());
    }
    if (c.n_layers < 1 || c.d_hidden < 1 || c.vocab < 1) {
        fail(ErrorKind::usage, "toy config: n_layers, d_hidden and vocab must be >= 1");
    }
    return c;
}

ToyConfig source_config() { return {4, 64, 32, 0x5EED0001}; }
ToyConfig target_config() { return {4, 48, 32, 0x5EED0002}; }

ToyNetParams ToyNetParams::generate(const ToyConfig& config) {
    const std::size_t d = config.d_hidden;
    ToyNetParams p;
    p.config = config;
    std::mt19937_64 rng(config.seed);

    p.embeddings = Matrix(config.vocab, d);
    for (auto& x : p.embeddings.data()) x = uniform_pm1(rng);

    for (std::size_t l = 0; l < config.n_layers; ++l) {
        Matrix w(d, d);
        for (auto& x : w.data()) x = uniform_pm1(rng);
        const double fro = norm2(w.data());
        for (auto& x : w.data()) x /= fro;
        std::vector<double> b(d);
        for (auto& x : b) x = 0.1 * uniform_pm1(rng);
        p.mixing.push_back(std::move(w));
        p.bias.push_back(std::move(b));
    }
    return p;
}

ForwardResult toy_forward(const ToyNetParams& params, std::span<const int> tokens,
                          const steering::LayerHook* hook, steering::Positions positions) {
    const auto& cfg = params.config;
    const std::size_t d = cfg.d_hidden;
    if (tokens.empty()) fail(ErrorKind::usage, "toy_forward: empty token sequence");
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (tokens[i] < 0 || static_cast<std::size_t>(tokens[i]) >= cfg.vocab) {
            fail(ErrorKind::usage, "toy_forward: token " + std::to_string(tokens[i]) + " at position " +
                                       std::to_string(i) + " outside vocab of " + std::to_string(cfg.vocab));
        }
    }
    const std::size_t len = tokens.size();
    Matrix state(len, d);
    for (std::size_t p = 0; p < len; ++p) {
        const auto emb = params.embeddings.row(static_cast<std::size_t>(tokens[p]));
        std::copy(emb.begin(), emb.end(), state.row(p).begin());
    }

    ForwardResult result;
    result.final_hidden = Matrix(cfg.n_layers, d);
    std::vector<double> context(d);
    // ||w||_F = 1 leaves entries of w * context near 1/sqrt(d); sqrt(d) brings them back to O(1).
    const double gain = std::sqrt(static_cast<double>(d));
    for (std::size_t l = 0; l < cfg.n_layers; ++l) {
        const auto& w = params.mixing[l];
        const auto& b = params.bias[l];
        Matrix next(len, d);
        std::vector<double> running(d, 0.0);
        double weight_sum = 0.0;
        for (std::size_t p = 0; p < len; ++p) {
            // Recency-weighted causal average: position q gets weight q + 1.
            const double wq = static_cast<double>(p + 1);
            const auto row = state.row(p);
            for (std::size_t c = 0; c < d; ++c) running[c] += wq * row[c];
            weight_sum += wq;
            for (std::size_t c = 0; c < d; ++c) context[c] = running[c] / weight_sum;

            auto out = next.row(p);
            for (std::size_t r = 0; r < d; ++r) {
                const double pre = gain * dot(w.row(r), context) + b[r];
                out[r] = row[r] + softsign(pre);
            }
        }
        if (hook != nullptr) {
            const std::size_t first = positions == steering::Positions::all ? 0 : len - 1;
            for (std::size_t p = first; p < len; ++p) {
                const auto replaced = (*hook)(static_cast<int>(l), next.row(p));
                std::copy(replaced.begin(), replaced.end(), next.row(p).begin());
            }
        }
        const auto last = next.row(len - 1);
        std::copy(last.begin(), last.end(), result.final_hidden.row(l).begin());
        state = std::move(next);
    }

    const auto final_state = state.row(len - 1);
    result.logits.resize(cfg.vocab);
    for (std::size_t t = 0; t < cfg.vocab; ++t) {
        result.logits[t] = dot(params.embeddings.row(t), final_state) / gain;
    }
    return result;
}

nlohmann::json SynthSpec::to_json() const {
    return {{"n", n},
            {"d", d},
            {"k_signal", k_signal},
            {"signal_norm", signal_norm},
            {"noise_energy", noise_energy},
            {"residual_energy", residual_energy},
            {"noise_mode", noise_mode == NoiseMode::out_of_band ? "out_of_band" : "broadband"},
            {"seed", seed}};
}

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
    SynthSpec s;
    try {
        s.n = j.at("n").get<std::size_t>();
        s.d = j.at("d").get<std::size_t>();
        s.k_signal = j.at("k_signal").get<std::size_t>();
        s.signal_norm = j.value("signal_norm", s.signal_norm);
        s.noise_energy = j.value("noise_energy", s.noise_energy);
        s.residual_energy = j.value("residual_energy", s.residual_energy);
        s.seed = j.value("seed", s.seed);
        const auto mode = j.value("noise_mode", std::string("out_of_band"));
        if (mode == "out_of_band") s.noise_mode = NoiseMode::out_of_band;
        else if (mode == "broadband") s.noise_mode = NoiseMode::broadband;
        else fail(ErrorKind::usage, "synth spec: noise_mode must be 'out_of_band' or 'broadband'");
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::usage, std::string("synth spec: ") + e.what());
    }
    validate(s);
    return s;
}

std::vector<double> synth_signal(const SynthSpec& spec) {
    validate(spec);
    std::mt19937_64 rng(spec.seed);
    auto s = spectral::lowpass_filter(gaussian(rng, spec.d), spec.k_signal);
    const double norm = norm2(s);
    if (norm == 0.0) fail(ErrorKind::degenerate, "synth: signal draw has no passband energy");
    for (auto& x : s) x *= spec.signal_norm / norm;
    return s;
}

latrep::DirectionSet synth_directions(const SynthSpec& spec) {
    validate(spec);
    const auto signal = synth_signal(spec);
    const std::size_t d = spec.d;
    const std::size_t pass = passband_size(d, spec.k_signal);
    const double out_scale = spec.noise_mode == NoiseMode::broadband
                                 ? std::sqrt(spec.noise_energy / static_cast<double>(d))
                                 : std::sqrt(spec.noise_energy / static_cast<double>(d - pass));
    const double in_scale = std::sqrt(spec.residual_energy / static_cast<double>(pass));

    // Row streams are seeded off the spec seed so they are independent of the signal stream.
    std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ULL);
    latrep::DirectionSet out{Matrix(spec.n, d), 0, "synthetic", "synth"};
    for (std::size_t i = 0; i < spec.n; ++i) {
        const auto g = gaussian(rng, d);
        const auto r = gaussian(rng, d);
        std::vector<double> noise(d);
        if (spec.noise_mode == NoiseMode::broadband) {
            for (std::size_t c = 0; c < d; ++c) noise[c] = out_scale * g[c];
        } else {
            const auto low = spectral::lowpass_filter(g, spec.k_signal);
            for (std::size_t c = 0; c < d; ++c) noise[c] = out_scale * (g[c] - low[c]);
        }
        const auto residual = spectral::lowpass_filter(r, spec.k_signal);
        auto row = out.rows.row(i);
        for (std::size_t c = 0; c < d; ++c) {
            row[c] = signal[c];
            if (spec.noise_energy > 0.0) row[c] += noise[c];
            if (spec.residual_energy > 0.0) row[c] += in_scale * residual[c];
        }
    }
    return out;
}

nlohmann::json DriftReport::to_json() const {
    return {{"trace_raw_clean", trace_raw_clean},
            {"trace_raw_noisy", trace_raw_noisy},
            {"trace_filtered_clean", trace_filtered_clean},
            {"trace_filtered_noisy", trace_filtered_noisy}};
}

latrep::DirectionSet lowpass_rows(const latrep::DirectionSet& dirs, std::size_t k) {
    latrep::DirectionSet out = dirs;
    for (std::size_t r = 0; r < dirs.n(); ++r) {
        const auto filtered = spectral::lowpass_filter(dirs.rows.row(r), k);
        std::copy(filtered.begin(), filtered.end(), out.rows.row(r).begin());
    }
    return out;
}

DriftReport drift_experiment(const SynthSpec& clean, const SynthSpec& noisy, std::size_t k) {
    if (clean.d != noisy.d) {
        fail(ErrorKind::dimension, "drift: clean d=" + std::to_string(clean.d) + " vs noisy d=" +
                                       std::to_string(noisy.d));
    }
    if (k < clean.k_signal || k < noisy.k_signal) {
        fail(ErrorKind::usage, "drift: cutoff k=" + std::to_string(k) + " below a spec's k_signal");
    }
    const auto clean_dirs = synth_directions(clean);
    const auto noisy_dirs = synth_directions(noisy);
    DriftReport report;
    report.trace_raw_clean = latrep::covariance_trace(clean_dirs);
    report.trace_raw_noisy = latrep::covariance_trace(noisy_dirs);
    report.trace_filtered_clean = latrep::covariance_trace(lowpass_rows(clean_dirs, k));
    report.trace_filtered_noisy = latrep::covariance_trace(lowpass_rows(noisy_dirs, k));
    return report;
}

}  // namespace l2v::toy
