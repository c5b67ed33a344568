#pragma once

// Desk-scale stand-ins for a source and a target model.
//
// ToyNet is a tiny residual network over token ids. Each layer mixes a
// recency-weighted causal average of the previous layer's states through a
// d x d matrix (scaled to unit Frobenius norm, so spectral norm <= 1), applies
// softsign, and adds the result back to the residual stream. Logits are the
// tied token embeddings dotted with the final-position state, over sqrt(d).
//
// Weights are drawn from std::mt19937_64 seeded with ToyConfig::seed, with
// each 64-bit draw mapped to [-1, 1) as (x >> 11) * 2^-52 - 1. The forward
// pass uses only +, -, *, / and sqrt, so results are bit-identical on any
// IEEE-754 platform when the build disables floating-point contraction.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "l2v/latrep.hpp"
#include "l2v/matrix.hpp"
#include "l2v/steering.hpp"

namespace l2v::toy {

struct ToyConfig {
    std::size_t n_layers = 4;
    std::size_t d_hidden = 64;
    std::size_t vocab = 32;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static ToyConfig from_json(const nlohmann::json& j);
};

/// Canonical fixture shapes: the source is wider than the target, so every
/// end-to-end run goes through the 64 -> 48 resample path.
ToyConfig source_config();
ToyConfig target_config();

struct ToyNetParams {
    ToyConfig config;
    Matrix embeddings;            // vocab x d
    std::vector<Matrix> mixing;   // n_layers of d x d
    std::vector<std::vector<double>> bias;  // n_layers of d

    static ToyNetParams generate(const ToyConfig& config);
};

struct ForwardResult {
    std::vector<double> logits;
    /// Row l is the final-position state after layer l, after any hook.
    Matrix final_hidden;
};

/// Runs the network. When a hook is given it is applied to the output of
/// every layer (the hook decides whether to act) at the selected positions,
/// before the next layer reads it.
ForwardResult toy_forward(const ToyNetParams& params, std::span<const int> tokens,
                          const steering::LayerHook* hook = nullptr,
                          steering::Positions positions = steering::Positions::last);

enum class NoiseMode { out_of_band, broadband };

struct SynthSpec {
    std::size_t n = 100;
    std::size_t d = 64;
    std::size_t k_signal = 8;
    double signal_norm = 1.0;
    /// Expected per-row noise energy; outside the signal passband unless broadband.
    double noise_energy = 0.0;
    /// Expected per-row energy of zero-mean noise inside the passband.
    double residual_energy = 0.0;
    NoiseMode noise_mode = NoiseMode::out_of_band;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static SynthSpec from_json(const nlohmann::json& j);
};

/// Row i = s + noise_i, with s a seeded vector inside the k_signal passband of
/// norm signal_norm. Random draws do not depend on the energies, so changing
/// an energy with the same seed rescales the same noise.
latrep::DirectionSet synth_directions(const SynthSpec& spec);

/// The fixed signal s used by synth_directions for this spec.
std::vector<double> synth_signal(const SynthSpec& spec);

struct DriftReport {
    double trace_raw_clean = 0.0;
    double trace_raw_noisy = 0.0;
    double trace_filtered_clean = 0.0;
    double trace_filtered_noisy = 0.0;

    nlohmann::json to_json() const;
};

/// Row-wise low-pass of a direction set.
latrep::DirectionSet lowpass_rows(const latrep::DirectionSet& dirs, std::size_t k);

DriftReport drift_experiment(const SynthSpec& clean, const SynthSpec& noisy, std::size_t k);

}  // namespace l2v::toy
