#pragma once

// Cross-model CoT steering: build a low-pass pattern from source-model
// direction sets, match it to the target hidden size, and inject it into
// target hidden states with norm renormalization.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "l2v/latrep.hpp"
#include "l2v/tensor_store.hpp"

namespace l2v::steering {

/// Which sequence positions receive the injection during a forward pass.
enum class Positions { last, all };

/// Whether the filter runs on the aggregated mean or on every row before averaging.
/// Both agree up to rounding because the filter is linear.
enum class FilterMode { aggregate, per_sample };

struct SteeringConfig {
    std::size_t k = 1;
    std::size_t d_source = 1;
    std::size_t d_target = 1;
    int layer_source = 0;
    int layer_target = 0;
    double alpha = 0.0;
    bool bypass_filter = false;
    FilterMode filter_mode = FilterMode::aggregate;
    Positions positions = Positions::last;

    /// Throws usage errors for k outside [1, min(d_source, d_target)], negative or non-finite alpha.
    void validate() const;

    nlohmann::json to_json() const;
    /// Missing keys keep the values already in `base`.
    static SteeringConfig from_json(const nlohmann::json& j, SteeringConfig base);
    static SteeringConfig from_json(const nlohmann::json& j);
};

struct SteeringVector {
    std::vector<double> values;
    double original_norm = 0.0;
    SteeringConfig config;
    std::string prompt_set;
    std::string source_tag;

    /// Rank-1 tensor, binary64, config and provenance in metadata.
    store::TensorFile to_file() const;
    static SteeringVector from_file(const store::TensorFile& file);
};

/// Ratio ||s|| / ||v|| below which the filtered pattern counts as empty.
inline constexpr double kDegenerateRatio = 1e-12;

SteeringVector extract_pattern(const latrep::DirectionSet& dirs, const SteeringConfig& cfg);

/// h + alpha * v, rescaled back to ||h||. alpha == 0 returns h unchanged.
std::vector<double> inject(std::span<const double> h, std::span<const double> v, double alpha);
std::vector<double> inject(std::span<const double> h, const SteeringVector& sv, double alpha);

/// Transforms the hidden state of one position at one layer.
using LayerHook = std::function<std::vector<double>(int layer, std::span<const double> state)>;

/// Injects at cfg.layer_target with cfg.alpha, passes other layers through.
/// Every call checks the state length against the vector.
LayerHook make_hook(SteeringVector sv, const SteeringConfig& cfg);

/// Reads positive/negative tensors, extracts the pattern, writes it to out_path.
/// Errors carry the failing stage: read_tensor, direction_set, extract_pattern, write_tensor.
SteeringVector run_pipeline(const std::filesystem::path& pos_path, const std::filesystem::path& neg_path,
                            const SteeringConfig& cfg, const std::filesystem::path& out_path);

}  // namespace l2v::steering
