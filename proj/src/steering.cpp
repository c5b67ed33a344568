#include "l2v/steering.hpp"

#include <cmath>

#include "l2v/error.hpp"
#include "l2v/spectral.hpp"

namespace l2v::steering {

namespace {

std::vector<double> resample(std::span<const double> v, const SteeringConfig& cfg) {
    if (cfg.bypass_filter) return spectral::spectral_resample_unmasked(v, cfg.d_target);
    return spectral::spectral_resample(v, cfg.d_target, cfg.k);
}

template <typename F>
auto staged(const char* stage, F&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw e.tagged(stage);
    }
}

}  // namespace

void SteeringConfig::validate() const {
    if (d_source < 1 || d_target < 1) fail(ErrorKind::usage, "d_source and d_target must be >= 1");
    if (k < 1 || k > std::min(d_source, d_target)) {
        fail(ErrorKind::usage, "cutoff k=" + std::to_string(k) + " outside [1, " +
                                   std::to_string(std::min(d_source, d_target)) + "]");
    }
    if (!std::isfinite(alpha) || alpha < 0.0) {
        fail(ErrorKind::usage, "alpha must be finite and >= 0");
    }
}

nlohmann::json SteeringConfig::to_json() const {
    return {{"k", k},
            {"d_source", d_source},
            {"d_target", d_target},
            {"layer_source", layer_source},
            {"layer_target", layer_target},
            {"alpha", alpha},
            {"bypass_filter", bypass_filter},
            {"filter_mode", filter_mode == FilterMode::aggregate ? "aggregate" : "per_sample"},
            {"positions", positions == Positions::last ? "last" : "all"}};
}

SteeringConfig SteeringConfig::from_json(const nlohmann::json& j, SteeringConfig base) {
    if (!j.is_object()) fail(ErrorKind::usage, "steering config must be a JSON object");
    try {
        if (j.contains("k")) base.k = j.at("k").get<std::size_t>();
        if (j.contains("d_source")) base.d_source = j.at("d_source").get<std::size_t>();
        if (j.contains("d_target")) base.d_target = j.at("d_target").get<std::size_t>();
        if (j.contains("layer_source")) base.layer_source = j.at("layer_source").get<int>();
        if (j.contains("layer_target")) base.layer_target = j.at("layer_target").get<int>();
        if (j.contains("alpha")) base.alpha = j.at("alpha").get<double>();
        if (j.contains("bypass_filter")) base.bypass_filter = j.at("bypass_filter").get<bool>();
        if (j.contains("filter_mode")) {
            const auto mode = j.at("filter_mode").get<std::string>();
            if (mode == "aggregate") base.filter_mode = FilterMode::aggregate;
            else if (mode == "per_sample") base.filter_mode = FilterMode::per_sample;
            else fail(ErrorKind::usage, "filter_mode must be 'aggregate' or 'per_sample'");
        }
        if (j.contains("positions")) {
            const auto pos = j.at("positions").get<std::string>();
            if (pos == "last") base.positions = Positions::last;
            else if (pos == "all") base.positions = Positions::all;
            else fail(ErrorKind::usage, "positions must be 'last' or 'all'");
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::usage, std::string("steering config: ") + e.what());
    }
    return base;
}

SteeringConfig SteeringConfig::from_json(const nlohmann::json& j) {
    return from_json(j, SteeringConfig{});
}

store::TensorFile SteeringVector::to_file() const {
    store::TensorFile file;
    file.dims = {values.size()};
    file.dtype = store::DType::f64;
    file.meta = {{"model", source_tag},
                 {"layer", config.layer_source},
                 {"prompt_set", prompt_set},
                 {"role", "pattern"},
                 {"original_norm", original_norm},
                 {"config", config.to_json()}};
    file.values = values;
    return file;
}

SteeringVector SteeringVector::from_file(const store::TensorFile& file) {
    if (file.rank() != 1) {
        fail(ErrorKind::dimension, "steering vector must be a rank-1 tensor, got rank " +
                                       std::to_string(file.rank()));
    }
    SteeringVector sv;
    sv.values = file.values;
    const auto& meta = file.meta;
    sv.source_tag = meta.value("model", std::string{});
    sv.prompt_set = meta.value("prompt_set", std::string{});
    sv.original_norm = meta.value("original_norm", norm2(sv.values));
    SteeringConfig base;
    base.d_source = sv.values.size();
    base.d_target = sv.values.size();
    base.k = 1;
    sv.config = meta.contains("config") ? SteeringConfig::from_json(meta.at("config"), base) : base;
    if (sv.config.d_target != sv.values.size()) {
        fail(ErrorKind::dimension, "steering vector length " + std::to_string(sv.values.size()) +
                                       " disagrees with config d_target " +
                                       std::to_string(sv.config.d_target));
    }
    return sv;
}

SteeringVector extract_pattern(const latrep::DirectionSet& dirs, const SteeringConfig& cfg) {
    cfg.validate();
    if (dirs.d() != cfg.d_source) {
        fail(ErrorKind::dimension, "direction dimension " + std::to_string(dirs.d()) +
                                       " does not match d_source " + std::to_string(cfg.d_source));
    }
    const auto pattern = latrep::mean_pattern(dirs);
    const double original = norm2(pattern.values);

    std::vector<double> shaped;
    if (cfg.filter_mode == FilterMode::aggregate) {
        shaped = resample(pattern.values, cfg);
    } else {
        shaped.assign(cfg.d_target, 0.0);
        for (std::size_t r = 0; r < dirs.n(); ++r) {
            const auto row = resample(dirs.rows.row(r), cfg);
            for (std::size_t c = 0; c < cfg.d_target; ++c) shaped[c] += row[c];
        }
        const double inv = 1.0 / static_cast<double>(dirs.n());
        for (auto& x : shaped) x *= inv;
    }

    const double filtered = norm2(shaped);
    if (original == 0.0 || !(filtered > kDegenerateRatio * original)) {
        fail(ErrorKind::degenerate, "degenerate pattern: ||v|| = " + std::to_string(original) +
                                        ", filtered norm = " + std::to_string(filtered) +
                                        " (no energy left in the passband)");
    }
    const double gain = original / filtered;
    for (auto& x : shaped) x *= gain;

    SteeringVector sv;
    sv.values = std::move(shaped);
    sv.original_norm = original;
    sv.config = cfg;
    sv.prompt_set = pattern.prompt_set;
    sv.source_tag = pattern.source_tag;
    return sv;
}

std::vector<double> inject(std::span<const double> h, std::span<const double> v, double alpha) {
    if (h.size() != v.size()) {
        fail(ErrorKind::dimension, "inject: hidden state length " + std::to_string(h.size()) +
                                       " vs steering vector length " + std::to_string(v.size()));
    }
    if (!std::isfinite(alpha) || alpha < 0.0) fail(ErrorKind::usage, "inject: alpha must be finite and >= 0");
    const double h_norm = norm2(h);
    if (h_norm == 0.0) fail(ErrorKind::degenerate, "inject: hidden state has zero norm");
    if (alpha == 0.0) return {h.begin(), h.end()};

    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = h[i] + alpha * v[i];
    const double out_norm = norm2(out);
    if (out_norm == 0.0) fail(ErrorKind::degenerate, "inject: injection cancels the hidden state exactly");
    const double gain = h_norm / out_norm;
    for (auto& x : out) x *= gain;
    return out;
}

std::vector<double> inject(std::span<const double> h, const SteeringVector& sv, double alpha) {
    return inject(h, std::span<const double>(sv.values), alpha);
}

LayerHook make_hook(SteeringVector sv, const SteeringConfig& cfg) {
    if (sv.values.size() != cfg.d_target) {
        fail(ErrorKind::dimension, "make_hook: vector length " + std::to_string(sv.values.size()) +
                                       " vs d_target " + std::to_string(cfg.d_target));
    }
    if (!std::isfinite(cfg.alpha) || cfg.alpha < 0.0) fail(ErrorKind::usage, "make_hook: alpha must be finite and >= 0");
    return [sv = std::move(sv), layer = cfg.layer_target, alpha = cfg.alpha](
               int layer_index, std::span<const double> state) -> std::vector<double> {
        if (state.size() != sv.values.size()) {
            fail(ErrorKind::dimension, "hook: hidden state length " + std::to_string(state.size()) +
                                           " vs steering vector length " + std::to_string(sv.values.size()));
        }
        if (layer_index != layer) return {state.begin(), state.end()};
        return inject(state, sv, alpha);
    };
}

SteeringVector run_pipeline(const std::filesystem::path& pos_path, const std::filesystem::path& neg_path,
                            const SteeringConfig& cfg, const std::filesystem::path& out_path) {
    const auto pos = staged("read_tensor", [&] { return store::read_tensor(pos_path); });
    const auto neg = staged("read_tensor", [&] { return store::read_tensor(neg_path); });
    const auto dirs = staged("direction_set", [&] { return latrep::direction_set(pos, neg); });
    auto sv = staged("extract_pattern", [&] { return extract_pattern(dirs, cfg); });
    staged("write_tensor", [&] {
        store::write_file(out_path, sv.to_file());
        return 0;
    });
    return sv;
}

}  // namespace l2v::steering
