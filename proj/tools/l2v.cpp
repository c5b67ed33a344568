// l2v: command-line front end for pattern extraction, analysis and toy steering runs.
//
// Exit codes: 0 ok, 2 usage, 3 io/format, 4 dimension/shape, 5 degenerate math.
// Errors are also reported as one JSON record on stderr.
//
// Every subcommand accepts --config FILE (JSON). Values given as flags win over
// the file. All outputs, including the manifest, are published together only
// after the whole command succeeded.

#include <cmath>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli_support.hpp"
#include "l2v/error.hpp"
#include "l2v/latrep.hpp"
#include "l2v/report.hpp"
#include "l2v/spectral.hpp"
#include "l2v/steering.hpp"
#include "l2v/tensor_store.hpp"
#include "l2v/toymodel.hpp"
#include "l2v/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace l2v::cli {
namespace {

struct Common {
    std::string config_path;
    std::string manifest_path;

    json file_config;

    void load() {
        file_config = config_path.empty() ? json::object() : load_json_file(config_path);
        if (!file_config.is_object()) fail(ErrorKind::usage, "--config must hold a JSON object");
    }

    template <typename T>
    std::optional<T> pick(const std::optional<T>& flag, const char* key) const {
        if (flag) return flag;
        if (auto it = file_config.find(key); it != file_config.end()) {
            try {
                return it->get<T>();
            } catch (const json::exception& e) {
                fail(ErrorKind::usage, std::string("config key '") + key + "': " + e.what());
            }
        }
        return std::nullopt;
    }

    template <typename T>
    T require(const std::optional<T>& flag, const char* key) const {
        auto v = pick(flag, key);
        if (!v) fail(ErrorKind::usage, std::string("missing required option '") + key + "'");
        return *v;
    }

    fs::path manifest_for(const fs::path& primary) const {
        if (!manifest_path.empty()) return manifest_path;
        auto p = primary;
        p += ".manifest.json";
        return p;
    }
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--config", common.config_path, "JSON file with option values (flags take precedence)");
    cmd->add_option("--manifest", common.manifest_path, "manifest path (default: <output>.manifest.json)");
}

void publish(OutputSet& outputs, const Manifest& manifest, const fs::path& manifest_path) {
    const auto text = manifest.render(outputs);
    outputs.add_text(manifest_path, text);
    outputs.commit();
}

store::ActivationMatrix read_matrix(const fs::path& path) {
    try {
        return store::read_tensor(path);
    } catch (const Error& e) {
        throw e.tagged("read_tensor");
    }
}

std::vector<double> read_pattern(const fs::path& path) {
    const auto m = read_matrix(path);
    if (m.n() == 1) return {m.values.data().begin(), m.values.data().end()};
    latrep::DirectionSet dirs{m.values, m.layer, m.source_tag, m.prompt_set};
    return latrep::mean_pattern(dirs).values;
}

steering::Positions parse_positions(const std::string& s) {
    if (s == "last") return steering::Positions::last;
    if (s == "all") return steering::Positions::all;
    fail(ErrorKind::usage, "positions must be 'last' or 'all', got '" + s + "'");
}

toy::ToyConfig resolve_toy(const Common& common, const std::optional<std::string>& toy_name,
                           const std::optional<std::string>& toy_config, const char* fallback) {
    if (auto path = common.pick(toy_config, "toy_config")) return toy::ToyConfig::from_json(load_json_file(*path));
    const auto name = common.pick(toy_name, "toy").value_or(fallback);
    if (name == "source") return toy::source_config();
    if (name == "target") return toy::target_config();
    fail(ErrorKind::usage, "--toy must be 'source' or 'target', got '" + name + "'");
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
    Common common;
    std::optional<std::string> pos, neg, out;
    std::optional<std::size_t> k, d_target;
    std::optional<int> layer_source, layer_target;
    std::optional<double> alpha;
    std::optional<bool> bypass;
    std::optional<std::string> filter_mode, positions;
    std::optional<std::string> preset_file, preset;
};

json lookup_preset(const fs::path& file, const std::string& key) {
    const auto table = load_json_file(file);
    const auto slash = key.find('/');
    if (slash == std::string::npos) fail(ErrorKind::usage, "--preset must look like MODEL/TASK");
    const auto model = key.substr(0, slash), task = key.substr(slash + 1);
    const auto& models = table.at("models");
    if (!models.contains(model)) fail(ErrorKind::usage, "unknown preset model '" + model + "'");
    const auto& entry = models.at(model);
    if (!entry.at("layer").contains(task)) fail(ErrorKind::usage, "unknown preset task '" + task + "'");
    return {{"layer_target", entry.at("layer").at(task)}, {"alpha", entry.at("alpha").at(task)}};
}

int run_extract(ExtractArgs& a) {
    auto& c = a.common;
    c.load();
    const fs::path pos = c.require(a.pos, "pos");
    const fs::path neg = c.require(a.neg, "neg");
    const fs::path out = c.require(a.out, "out");

    const auto pos_m = read_matrix(pos);
    const auto neg_m = read_matrix(neg);

    json preset = json::object();
    if (a.preset) {
        if (!a.preset_file) fail(ErrorKind::usage, "--preset needs --preset-file");
        preset = lookup_preset(*a.preset_file, *a.preset);
    }

    steering::SteeringConfig cfg;
    cfg.d_source = pos_m.d();
    if (c.file_config.contains("d_source") && c.file_config["d_source"].get<std::size_t>() != cfg.d_source) {
        fail(ErrorKind::dimension, "config d_source " + c.file_config["d_source"].dump() +
                                       " does not match input dimension " + std::to_string(cfg.d_source));
    }
    cfg.k = c.require(a.k, "k");
    cfg.d_target = c.pick(a.d_target, "d_target").value_or(cfg.d_source);
    cfg.layer_source = c.pick(a.layer_source, "layer_source").value_or(pos_m.layer);
    auto layer_target = c.pick(a.layer_target, "layer_target");
    if (!layer_target && preset.contains("layer_target")) layer_target = preset["layer_target"].get<int>();
    if (!layer_target) fail(ErrorKind::usage, "missing required option 'layer_target'");
    cfg.layer_target = *layer_target;
    auto alpha = c.pick(a.alpha, "alpha");
    if (!alpha && preset.contains("alpha")) alpha = preset["alpha"].get<double>();
    if (!alpha) fail(ErrorKind::usage, "missing required option 'alpha'");
    cfg.alpha = *alpha;
    cfg.bypass_filter = c.pick(a.bypass, "bypass_filter").value_or(false);
    const auto mode = c.pick(a.filter_mode, "filter_mode").value_or("aggregate");
    if (mode == "aggregate") cfg.filter_mode = steering::FilterMode::aggregate;
    else if (mode == "per_sample") cfg.filter_mode = steering::FilterMode::per_sample;
    else fail(ErrorKind::usage, "filter_mode must be 'aggregate' or 'per_sample'");
    cfg.positions = parse_positions(c.pick(a.positions, "positions").value_or("last"));
    cfg.validate();

    latrep::DirectionSet dirs;
    try {
        dirs = latrep::direction_set(pos_m, neg_m);
    } catch (const Error& e) {
        throw e.tagged("direction_set");
    }
    steering::SteeringVector sv;
    try {
        sv = steering::extract_pattern(dirs, cfg);
    } catch (const Error& e) {
        throw e.tagged("extract_pattern");
    }

    Manifest manifest("extract");
    manifest.add_input(pos);
    manifest.add_input(neg);
    manifest.config() = cfg.to_json();
    manifest.results() = {{"n", dirs.n()},
                          {"original_norm", sv.original_norm},
                          {"vector_norm", norm2(sv.values)},
                          {"covariance_trace", latrep::covariance_trace(dirs)}};
    OutputSet outputs;
    outputs.add(out, store::encode(sv.to_file()));
    publish(outputs, manifest, c.manifest_for(out));
    std::cout << "wrote " << out.string() << " (d=" << sv.values.size() << ", norm "
              << report::format_number(sv.original_norm) << ")\n";
    return 0;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    Common common;
    std::optional<std::string> dirs, out, svg;
    std::optional<std::size_t> m;
};

int run_analyze(AnalyzeArgs& a) {
    auto& c = a.common;
    c.load();
    const fs::path in = c.require(a.dirs, "dirs");
    const fs::path out = c.require(a.out, "out");
    const auto m = c.pick(a.m, "m").value_or(2);
    const auto svg = c.pick(a.svg, "svg");

    const auto mat = read_matrix(in);
    const latrep::DirectionSet dirs{mat.values, mat.layer, mat.source_tag, mat.prompt_set};
    const double trace = latrep::covariance_trace(dirs);
    const auto model = latrep::pca_fit(dirs, m);
    const auto proj = latrep::pca_project(model, dirs.rows);

    Manifest manifest("analyze");
    manifest.add_input(in);
    manifest.config() = {{"dirs", in.string()}, {"m", m}, {"svg", svg.value_or("")}};
    manifest.results() = {{"n", dirs.n()},
                          {"d", dirs.d()},
                          {"layer", dirs.layer},
                          {"trace", trace},
                          {"explained_variance", model.explained_variance}};
    OutputSet outputs;
    outputs.add_text(out, report::projections_csv(proj, store::to_string(mat.role)));
    if (svg) {
        outputs.add_text(*svg, report::scatter_svg(proj, "PCA of " + std::string(store::to_string(mat.role)) +
                                                             " representations, layer " +
                                                             std::to_string(dirs.layer)));
    }
    publish(outputs, manifest, c.manifest_for(out));
    std::cout << "trace " << report::format_number(trace) << "\n";
    return 0;
}

// ---------------------------------------------------------------- bands

struct BandsArgs {
    Common common;
    std::optional<std::string> a, b, out, svg;
    std::optional<std::size_t> n_bands;
};

int run_bands(BandsArgs& args) {
    auto& c = args.common;
    c.load();
    const fs::path pa = c.require(args.a, "a");
    const fs::path pb = c.require(args.b, "b");
    const fs::path out = c.require(args.out, "out");
    const auto svg = c.pick(args.svg, "svg");
    const auto va = read_pattern(pa);
    const auto vb = read_pattern(pb);
    if (va.size() != vb.size()) {
        fail(ErrorKind::dimension, "bands: lengths " + std::to_string(va.size()) + " and " +
                                       std::to_string(vb.size()) + " differ");
    }
    const auto n_bands = c.pick(args.n_bands, "n_bands").value_or(std::min<std::size_t>(8, spectral::max_bands(va.size())));

    const auto ea = spectral::band_energies(va, n_bands);
    const auto eb = spectral::band_energies(vb, n_bands);
    const auto err = spectral::band_relative_error(va, vb, n_bands);

    Manifest manifest("bands");
    manifest.add_input(pa);
    manifest.add_input(pb);
    manifest.config() = {{"a", pa.string()}, {"b", pb.string()}, {"n_bands", n_bands}, {"svg", svg.value_or("")}};
    manifest.results() = {{"relative_error", err}, {"energy_a", ea.energies}, {"energy_b", eb.energies}};
    OutputSet outputs;
    outputs.add_text(out, report::band_error_csv(ea, eb, err));
    if (svg) outputs.add_text(*svg, report::band_error_svg(err, "Relative energy difference across frequency bands"));
    publish(outputs, manifest, c.manifest_for(out));
    for (std::size_t i = 0; i < err.size(); ++i) {
        std::cout << spectral::band_label(i) << "\t" << report::format_number(err[i]) << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------- steer

struct SteerArgs {
    Common common;
    std::optional<std::string> hidden, vector, out;
    std::optional<double> alpha;
};

int run_steer(SteerArgs& a) {
    auto& c = a.common;
    c.load();
    const fs::path hidden = c.require(a.hidden, "hidden");
    const fs::path vec = c.require(a.vector, "vector");
    const fs::path out = c.require(a.out, "out");

    const auto h = read_matrix(hidden);
    steering::SteeringVector sv;
    try {
        sv = steering::SteeringVector::from_file(store::read_file(vec));
    } catch (const Error& e) {
        throw e.tagged("read_tensor");
    }
    const double alpha = c.pick(a.alpha, "alpha").value_or(sv.config.alpha);
    if (h.d() != sv.values.size()) {
        fail(ErrorKind::dimension, "steer: hidden dimension " + std::to_string(h.d()) +
                                       " vs steering vector length " + std::to_string(sv.values.size()));
    }

    store::ActivationMatrix result = h;
    double worst = 0.0;
    for (std::size_t r = 0; r < h.n(); ++r) {
        std::vector<double> row;
        try {
            row = steering::inject(h.values.row(r), sv, alpha);
        } catch (const Error& e) {
            throw Error(e.kind(), "row " + std::to_string(r) + ": " + e.message(), "inject");
        }
        const double before = norm2(h.values.row(r));
        worst = std::max(worst, std::abs(norm2(row) - before) / before);
        std::copy(row.begin(), row.end(), result.values.row(r).begin());
    }

    Manifest manifest("steer");
    manifest.add_input(hidden);
    manifest.add_input(vec);
    manifest.config() = {{"hidden", hidden.string()}, {"vector", vec.string()}, {"alpha", alpha}};
    manifest.results() = {{"rows", h.n()}, {"max_relative_norm_change", worst}};
    OutputSet outputs;
    outputs.add(out, store::encode(store::to_file(result, store::DType::f64)));
    publish(outputs, manifest, c.manifest_for(out));
    std::cout << "steered " << h.n() << " rows\n";
    return 0;
}

// ---------------------------------------------------------------- toy-run

struct ToyRunArgs {
    Common common;
    std::optional<std::string> toy, toy_config, tokens, vector, out, positions;
    std::optional<double> alpha;
    std::optional<int> layer;
};

int run_toy(ToyRunArgs& a) {
    auto& c = a.common;
    c.load();
    const auto toy_cfg = resolve_toy(c, a.toy, a.toy_config, "target");
    const auto tokens = parse_tokens(c.require(a.tokens, "tokens"));
    const fs::path vec = c.require(a.vector, "vector");
    const fs::path out = c.require(a.out, "out");

    steering::SteeringVector sv;
    try {
        sv = steering::SteeringVector::from_file(store::read_file(vec));
    } catch (const Error& e) {
        throw e.tagged("read_tensor");
    }
    if (sv.values.size() != toy_cfg.d_hidden) {
        fail(ErrorKind::dimension, "toy-run: steering vector length " + std::to_string(sv.values.size()) +
                                       " vs toy d_hidden " + std::to_string(toy_cfg.d_hidden));
    }
    steering::SteeringConfig cfg = sv.config;
    cfg.alpha = c.pick(a.alpha, "alpha").value_or(sv.config.alpha);
    cfg.layer_target = c.pick(a.layer, "layer").value_or(sv.config.layer_target);
    if (auto p = c.pick(a.positions, "positions")) cfg.positions = parse_positions(*p);
    if (cfg.layer_target < 0 || static_cast<std::size_t>(cfg.layer_target) >= toy_cfg.n_layers) {
        fail(ErrorKind::usage, "toy-run: layer " + std::to_string(cfg.layer_target) + " outside [0, " +
                                   std::to_string(toy_cfg.n_layers) + ")");
    }

    const auto params = toy::ToyNetParams::generate(toy_cfg);
    const auto hook = steering::make_hook(sv, cfg);
    const auto base = toy::toy_forward(params, tokens);
    const auto steered = toy::toy_forward(params, tokens, &hook, cfg.positions);

    double dist2 = 0.0;
    for (std::size_t t = 0; t < base.logits.size(); ++t) {
        const double diff = steered.logits[t] - base.logits[t];
        dist2 += diff * diff;
    }
    const auto layer = static_cast<std::size_t>(cfg.layer_target);
    const double norm_base = norm2(base.final_hidden.row(layer));
    const double norm_steered = norm2(steered.final_hidden.row(layer));

    Manifest manifest("toy-run");
    manifest.add_input(vec);
    manifest.config() = {{"toy", toy_cfg.to_json()},
                         {"tokens", tokens},
                         {"alpha", cfg.alpha},
                         {"layer", cfg.layer_target},
                         {"positions", cfg.positions == steering::Positions::last ? "last" : "all"}};
    manifest.results() = {{"l2_distance", std::sqrt(dist2)},
                          {"target_layer_norm_baseline", norm_base},
                          {"target_layer_norm_steered", norm_steered},
                          {"target_layer_norm_relative_change", std::abs(norm_steered - norm_base) / norm_base}};
    OutputSet outputs;
    outputs.add_text(out, report::logits_csv({{"baseline", base.logits}, {"steered", steered.logits}}));
    publish(outputs, manifest, c.manifest_for(out));
    std::cout << "l2_distance " << report::format_number(std::sqrt(dist2)) << "\n";
    return 0;
}

// ---------------------------------------------------------------- toy-dump

struct ToyDumpArgs {
    Common common;
    std::optional<std::string> toy, toy_config, prompts, out_pos, out_neg, precision;
    std::optional<int> layer;
};

int run_toy_dump(ToyDumpArgs& a) {
    auto& c = a.common;
    c.load();
    const auto toy_cfg = resolve_toy(c, a.toy, a.toy_config, "source");
    const fs::path prompts_path = c.require(a.prompts, "prompts");
    const fs::path out_pos = c.require(a.out_pos, "out_pos");
    const fs::path out_neg = c.require(a.out_neg, "out_neg");
    const int layer = c.require(a.layer, "layer");
    const auto precision_name = c.pick(a.precision, "precision").value_or("f64");
    if (precision_name != "f64" && precision_name != "f32") fail(ErrorKind::usage, "--precision must be f64 or f32");
    const auto precision = precision_name == "f64" ? store::DType::f64 : store::DType::f32;
    if (layer < 0 || static_cast<std::size_t>(layer) >= toy_cfg.n_layers) {
        fail(ErrorKind::usage, "toy-dump: layer " + std::to_string(layer) + " outside [0, " +
                                   std::to_string(toy_cfg.n_layers) + ")");
    }

    const auto prompts = load_json_file(prompts_path);
    std::vector<std::vector<int>> pos_tokens, neg_tokens;
    try {
        for (const auto& pair : prompts.at("pairs")) {
            pos_tokens.push_back(pair.at("positive").get<std::vector<int>>());
            neg_tokens.push_back(pair.at("negative").get<std::vector<int>>());
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::format, prompts_path.string() + ": " + e.what());
    }
    if (pos_tokens.empty()) fail(ErrorKind::format, prompts_path.string() + ": no prompt pairs");
    const auto prompt_set = prompts.value("prompt_set", prompts_path.stem().string());

    const auto params = toy::ToyNetParams::generate(toy_cfg);
    const std::size_t n = pos_tokens.size(), d = toy_cfg.d_hidden;
    auto make = [&](store::Role role) {
        store::ActivationMatrix m;
        m.values = Matrix(n, d);
        m.role = role;
        m.layer = layer;
        m.source_tag = "toy:" + std::to_string(toy_cfg.seed);
        m.prompt_set = prompt_set;
        return m;
    };
    auto pos_m = make(store::Role::positive);
    auto neg_m = make(store::Role::negative);
    for (std::size_t i = 0; i < n; ++i) {
        const auto rp = toy::toy_forward(params, pos_tokens[i]);
        const auto rn = toy::toy_forward(params, neg_tokens[i]);
        const auto hp = rp.final_hidden.row(static_cast<std::size_t>(layer));
        const auto hn = rn.final_hidden.row(static_cast<std::size_t>(layer));
        std::copy(hp.begin(), hp.end(), pos_m.values.row(i).begin());
        std::copy(hn.begin(), hn.end(), neg_m.values.row(i).begin());
    }

    Manifest manifest("toy-dump");
    manifest.add_input(prompts_path);
    manifest.config() = {{"toy", toy_cfg.to_json()}, {"layer", layer}, {"precision", precision_name}};
    manifest.results() = {{"n", n}, {"d", d}};
    OutputSet outputs;
    outputs.add(out_pos, store::encode(store::to_file(pos_m, precision)));
    outputs.add(out_neg, store::encode(store::to_file(neg_m, precision)));
    publish(outputs, manifest, c.manifest_for(out_pos));
    std::cout << "dumped " << n << " pairs at layer " << layer << "\n";
    return 0;
}

// ---------------------------------------------------------------- drift

struct DriftArgs {
    Common common;
    std::optional<std::string> clean, noisy, out, dump_dir;
    std::optional<std::size_t> k;
};

int run_drift(DriftArgs& a) {
    auto& c = a.common;
    c.load();
    const fs::path clean_path = c.require(a.clean, "clean");
    const fs::path noisy_path = c.require(a.noisy, "noisy");
    const fs::path out = c.require(a.out, "out");
    const auto clean = toy::SynthSpec::from_json(load_json_file(clean_path));
    const auto noisy = toy::SynthSpec::from_json(load_json_file(noisy_path));
    const auto k = c.pick(a.k, "k").value_or(std::max(clean.k_signal, noisy.k_signal));
    const auto dump_dir = c.pick(a.dump_dir, "dump_dir");

    const auto report = toy::drift_experiment(clean, noisy, k);

    Manifest manifest("drift");
    manifest.add_input(clean_path);
    manifest.add_input(noisy_path);
    manifest.config() = {{"clean", clean.to_json()}, {"noisy", noisy.to_json()}, {"k", k},
                         {"dump_dir", dump_dir.value_or("")}};
    manifest.results() = report.to_json();
    OutputSet outputs;
    std::string csv = "metric,value\n";
    const auto traces = report.to_json();
    for (const auto& [key, value] : traces.items()) csv += key + "," + report::format_number(value.get<double>()) + "\n";
    outputs.add_text(out, csv);
    if (dump_dir) {
        auto dump = [&](const toy::SynthSpec& spec, const char* name) {
            auto dirs = toy::synth_directions(spec);
            dirs.prompt_set = name;
            outputs.add(fs::path(*dump_dir) / (std::string(name) + ".lvt"),
                        store::encode(store::to_file(dirs.to_activation(), store::DType::f64)));
        };
        dump(clean, "clean");
        dump(noisy, "noisy");
    }
    publish(outputs, manifest, c.manifest_for(out));
    std::cout << csv;
    return 0;
}

void report_error(const Error& e, const std::string& subcommand) {
    json record = {{"error",
                    {{"class", std::string(to_string(e.kind()))},
                     {"exit_code", exit_code(e.kind())},
                     {"stage", e.stage().empty() ? subcommand : e.stage()},
                     {"message", e.message()}}}};
    std::cerr << record.dump() << "\n";
}

}  // namespace
}  // namespace l2v::cli

int main(int argc, char** argv) {
    using namespace l2v;
    using namespace l2v::cli;

    CLI::App app{"l2v: low-pass CoT pattern extraction, analysis and steering toolkit"};
    app.set_version_flag("--version", std::string(kToolkitName) + " " + kToolkitVersion);
    app.require_subcommand(1);

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract", "positive/negative tensors -> steering vector");
    add_common(extract, ex.common);
    extract->add_option("--pos", ex.pos, "positive activations (.lvt)");
    extract->add_option("--neg", ex.neg, "negative activations (.lvt)");
    extract->add_option("--out", ex.out, "steering vector output (.lvt)");
    extract->add_option("--k", ex.k, "low-pass cutoff in bins");
    extract->add_option("--d-target", ex.d_target, "target hidden size (default: source size)");
    extract->add_option("--layer-source", ex.layer_source, "source layer (default: from tensor metadata)");
    extract->add_option("--layer-target", ex.layer_target, "injection layer in the target model");
    extract->add_option("--alpha", ex.alpha, "injection strength stored with the vector");
    extract->add_flag("--bypass-filter", ex.bypass, "skip the low-pass mask, resample only");
    extract->add_option("--filter-mode", ex.filter_mode, "aggregate | per_sample");
    extract->add_option("--positions", ex.positions, "last | all");
    extract->add_option("--preset-file", ex.preset_file, "JSON table of per-model/task layer and alpha");
    extract->add_option("--preset", ex.preset, "MODEL/TASK entry from --preset-file");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "dispersion trace and PCA projections of a direction set");
    add_common(analyze, an.common);
    analyze->add_option("--dirs", an.dirs, "direction set (.lvt)");
    analyze->add_option("--m", an.m, "number of principal components (default 2)");
    analyze->add_option("--out", an.out, "projection CSV");
    analyze->add_option("--svg", an.svg, "optional scatter plot (.svg)");

    BandsArgs bd;
    auto* bands = app.add_subcommand("bands", "per-band energy relative error of a against reference b");
    add_common(bands, bd.common);
    bands->add_option("--a", bd.a, "vector or matrix (.lvt); matrices are averaged to their mean row");
    bands->add_option("--b", bd.b, "reference vector or matrix (.lvt)");
    bands->add_option("--n-bands", bd.n_bands, "band count (default min(8, floor(d/2)+1))");
    bands->add_option("--out", bd.out, "band table CSV");
    bands->add_option("--svg", bd.svg, "optional bar chart (.svg)");

    SteerArgs st;
    auto* steer = app.add_subcommand("steer", "inject a steering vector into stored hidden states");
    add_common(steer, st.common);
    steer->add_option("--hidden", st.hidden, "hidden states (.lvt), one per row");
    steer->add_option("--vector", st.vector, "steering vector (.lvt)");
    steer->add_option("--alpha", st.alpha, "injection strength (default: from vector config)");
    steer->add_option("--out", st.out, "steered hidden states (.lvt)");

    ToyRunArgs tr;
    auto* toy_run = app.add_subcommand("toy-run", "baseline vs steered logits on a toy network");
    add_common(toy_run, tr.common);
    toy_run->add_option("--toy", tr.toy, "canonical toy network: source | target (default target)");
    toy_run->add_option("--toy-config", tr.toy_config, "toy network JSON (n_layers, d_hidden, vocab, seed)");
    toy_run->add_option("--tokens", tr.tokens, "comma-separated token ids");
    toy_run->add_option("--vector", tr.vector, "steering vector (.lvt)");
    toy_run->add_option("--alpha", tr.alpha, "injection strength (default: from vector config)");
    toy_run->add_option("--layer", tr.layer, "injection layer (default: from vector config)");
    toy_run->add_option("--positions", tr.positions, "last | all (default: from vector config)");
    toy_run->add_option("--out", tr.out, "logits CSV");

    ToyDumpArgs td;
    auto* toy_dump = app.add_subcommand("toy-dump", "final-token hidden states of a toy network for prompt pairs");
    add_common(toy_dump, td.common);
    toy_dump->add_option("--toy", td.toy, "canonical toy network: source | target (default source)");
    toy_dump->add_option("--toy-config", td.toy_config, "toy network JSON");
    toy_dump->add_option("--prompts", td.prompts, "JSON {prompt_set, pairs: [{id, positive, negative}]}");
    toy_dump->add_option("--layer", td.layer, "layer to dump");
    toy_dump->add_option("--out-pos", td.out_pos, "positive activations (.lvt)");
    toy_dump->add_option("--out-neg", td.out_neg, "negative activations (.lvt)");
    toy_dump->add_option("--precision", td.precision, "f64 | f32 (default f64)");

    DriftArgs dr;
    auto* drift = app.add_subcommand("drift", "synthetic dispersion experiment, raw vs low-pass traces");
    add_common(drift, dr.common);
    drift->add_option("--clean", dr.clean, "clean synth spec (JSON)");
    drift->add_option("--noisy", dr.noisy, "noisy synth spec (JSON)");
    drift->add_option("--k", dr.k, "cutoff (default: max k_signal)");
    drift->add_option("--out", dr.out, "trace CSV");
    drift->add_option("--dump-dir", dr.dump_dir, "also write both direction sets as .lvt here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        report_error(Error(ErrorKind::usage, e.what()), "parse");
        return exit_code(ErrorKind::usage);
    }

    std::string name = app.get_subcommands().front()->get_name();
    try {
        if (*extract) return run_extract(ex);
        if (*analyze) return run_analyze(an);
        if (*bands) return run_bands(bd);
        if (*steer) return run_steer(st);
        if (*toy_run) return run_toy(tr);
        if (*toy_dump) return run_toy_dump(td);
        if (*drift) return run_drift(dr);
    } catch (const Error& e) {
        report_error(e, name);
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        report_error(Error(ErrorKind::io, e.what()), name);
        return exit_code(ErrorKind::io);
    }
    return exit_code(ErrorKind::usage);
}
