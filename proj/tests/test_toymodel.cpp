#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "l2v/error.hpp"
#include "l2v/spectral.hpp"
#include "l2v/toymodel.hpp"
#include "oracles/oracles.hpp"

using namespace l2v;
using namespace l2v::toy;
using Catch::Approx;

namespace {

steering::SteeringVector random_vector(oracle::Rng& rng, std::size_t d) {
    steering::SteeringVector sv;
    sv.values = rng.normals(d);
    sv.config.d_source = d;
    sv.config.d_target = d;
    return sv;
}

steering::SteeringConfig hook_config(std::size_t d, int layer, double alpha) {
    steering::SteeringConfig cfg;
    cfg.k = 1;
    cfg.d_source = d;
    cfg.d_target = d;
    cfg.layer_target = layer;
    cfg.alpha = alpha;
    return cfg;
}

double row_norm(const Matrix& m, std::size_t r) { return norm2(m.row(r)); }

}  // namespace

TEST_CASE("canonical toy configs", "[toy]") {
    CHECK(source_config().d_hidden == 64);
    CHECK(target_config().d_hidden == 48);
    CHECK(source_config().n_layers == 4);
    CHECK(source_config().seed != target_config().seed);
    CHECK(ToyConfig::from_json(source_config().to_json()).to_json() == source_config().to_json());
    CHECK_THROWS_AS(ToyConfig::from_json(nlohmann::json{{"n_layers", 0}, {"d_hidden", 4}, {"vocab", 2}}), Error);
}

TEST_CASE("weights are reproducible and normalized", "[toy]") {
    const auto a = ToyNetParams::generate(source_config());
    const auto b = ToyNetParams::generate(source_config());
    CHECK(a.embeddings == b.embeddings);
    CHECK(a.mixing == b.mixing);
    CHECK(a.bias == b.bias);
    for (const auto& w : a.mixing) {
        CHECK(norm2(w.data()) == Approx(1.0).epsilon(1e-12));
        for (double x : w.data()) CHECK(std::isfinite(x));
    }
    auto other = source_config();
    other.seed += 1;
    CHECK_FALSE(ToyNetParams::generate(other).embeddings == a.embeddings);
}

TEST_CASE("toy_forward determinism and hooks", "[toy][forward]") {
    const auto params = ToyNetParams::generate(target_config());
    const std::vector<int> tokens{3, 17, 5, 28, 29, 30};
    const auto base = toy_forward(params, tokens);
    REQUIRE(base.logits.size() == 32);
    REQUIRE(base.final_hidden.rows() == 4);

    SECTION("repeat runs are bit-identical") {
        const auto again = toy_forward(params, tokens);
        CHECK(again.logits == base.logits);
        CHECK(again.final_hidden == base.final_hidden);
    }
    SECTION("alpha = 0 hook is a no-op at every position mode") {
        oracle::Rng rng(61);
        const auto hook = steering::make_hook(random_vector(rng, 48), hook_config(48, 2, 0.0));
        CHECK(toy_forward(params, tokens, &hook).logits == base.logits);
        CHECK(toy_forward(params, tokens, &hook, steering::Positions::all).logits == base.logits);
    }
    SECTION("hook locality and norm preservation") {
        oracle::Rng rng(62);
        for (int layer = 0; layer < 4; ++layer) {
            const auto hook = steering::make_hook(random_vector(rng, 48), hook_config(48, layer, 0.8));
            for (auto pos : {steering::Positions::last, steering::Positions::all}) {
                const auto steered = toy_forward(params, tokens, &hook, pos);
                for (int l = 0; l < layer; ++l) {
                    CHECK(std::vector<double>(steered.final_hidden.row(l).begin(), steered.final_hidden.row(l).end()) ==
                          std::vector<double>(base.final_hidden.row(l).begin(), base.final_hidden.row(l).end()));
                }
                const double want = row_norm(base.final_hidden, static_cast<std::size_t>(layer));
                CHECK(std::abs(row_norm(steered.final_hidden, static_cast<std::size_t>(layer)) - want) <= 1e-12 * want);
                CHECK(oracle::max_abs_diff(steered.logits, base.logits) > 1e-9);
            }
        }
    }
    SECTION("bad tokens and bad hook dimensions") {
        CHECK_THROWS_AS(toy_forward(params, std::vector<int>{}), Error);
        CHECK_THROWS_AS(toy_forward(params, std::vector<int>{1, 32}), Error);
        CHECK_THROWS_AS(toy_forward(params, std::vector<int>{-1}), Error);
        oracle::Rng rng(63);
        const auto wrong = steering::make_hook(random_vector(rng, 64), hook_config(64, 1, 0.5));
        try {
            toy_forward(params, tokens, &wrong);
            FAIL("dimension mismatch accepted");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::dimension);
        }
    }
}

TEST_CASE("synth_directions", "[toy][synth]") {
    SynthSpec spec;
    spec.n = 20;
    spec.d = 64;
    spec.k_signal = 8;
    spec.signal_norm = 2.0;
    spec.seed = 5;

    SECTION("noiseless rows all equal the signal") {
        const auto dirs = synth_directions(spec);
        const auto s = synth_signal(spec);
        CHECK(oracle::l2(s) == Approx(2.0));
        for (std::size_t r = 0; r < dirs.n(); ++r) {
            CHECK(std::vector<double>(dirs.rows.row(r).begin(), dirs.rows.row(r).end()) == s);
        }
        CHECK(latrep::covariance_trace(dirs) == 0.0);
    }
    SECTION("signal lives in the passband") {
        const auto s = synth_signal(spec);
        CHECK(oracle::max_abs_diff(oracle::naive_lowpass(s, spec.k_signal), s) < 1e-12);
    }
    SECTION("out-of-band noise disappears under the signal low-pass") {
        spec.noise_energy = 50.0;
        const auto dirs = synth_directions(spec);
        const auto s = synth_signal(spec);
        for (std::size_t r = 0; r < dirs.n(); ++r) {
            const std::vector<double> row(dirs.rows.row(r).begin(), dirs.rows.row(r).end());
            CHECK(oracle::max_abs_diff(oracle::naive_lowpass(row, spec.k_signal), s) < 1e-9);
        }
    }
    SECTION("energies rescale the same draws") {
        spec.noise_energy = 4.0;
        const auto a = synth_directions(spec);
        spec.noise_energy = 16.0;
        const auto b = synth_directions(spec);
        const auto s = synth_signal(spec);
        for (std::size_t i = 0; i < a.rows.data().size(); ++i) {
            const double na = a.rows.data()[i] - s[i % spec.d];
            const double nb = b.rows.data()[i] - s[i % spec.d];
            CHECK(nb == Approx(2.0 * na).margin(1e-12));
        }
    }
    SECTION("determinism") {
        spec.noise_energy = 3.0;
        spec.residual_energy = 1.0;
        CHECK(synth_directions(spec).rows == synth_directions(spec).rows);
    }
    SECTION("invalid spec") {
        spec.k_signal = 64;
        CHECK_THROWS_AS(synth_directions(spec), Error);
        spec.k_signal = 8;
        spec.noise_energy = -1.0;
        CHECK_THROWS_AS(synth_directions(spec), Error);
    }
}

TEST_CASE("synthetic trace tracks the noise energy", "[toy][synth][montecarlo]") {
    for (auto mode : {NoiseMode::out_of_band, NoiseMode::broadband}) {
        for (std::uint64_t seed : {1, 2, 3}) {
            SynthSpec spec;
            spec.n = 1000;
            spec.d = 512;
            spec.k_signal = 32;
            spec.signal_norm = 5.0;
            spec.noise_energy = 40.0;
            spec.noise_mode = mode;
            spec.seed = seed;
            const double tr = latrep::covariance_trace(synth_directions(spec));
            INFO("seed " << seed);
            CHECK(std::abs(tr - 40.0) < 0.10 * 40.0);
        }
    }
}

TEST_CASE("drift_experiment", "[toy][drift]") {
    SynthSpec clean;
    clean.n = 200;
    clean.d = 128;
    clean.k_signal = 16;
    clean.signal_norm = 3.0;
    clean.residual_energy = 10.0;
    clean.seed = 11;

    SECTION("noise five times the residual") {
        auto noisy = clean;
        noisy.seed = 12;
        noisy.noise_energy = 50.0;
        const auto r = drift_experiment(clean, noisy, 16);
        CHECK(r.trace_raw_noisy >= 4.0 * r.trace_raw_clean);
        CHECK(std::abs(r.trace_filtered_noisy - r.trace_filtered_clean) <= 0.15 * r.trace_filtered_clean);
    }
    SECTION("all zero") {
        auto quiet = clean;
        quiet.residual_energy = 0.0;
        const auto r = drift_experiment(quiet, quiet, 16);
        CHECK(r.trace_raw_clean == 0.0);
        CHECK(r.trace_raw_noisy == 0.0);
        CHECK(r.trace_filtered_clean == Approx(0.0).margin(1e-20));
        CHECK(r.trace_filtered_noisy == Approx(0.0).margin(1e-20));
    }
    SECTION("in-band-only noise is barely touched by the filter") {
        const auto r = drift_experiment(clean, clean, 16);
        CHECK(std::abs(r.trace_filtered_clean - r.trace_raw_clean) < 0.01 * r.trace_raw_clean);
    }
    SECTION("raw noisy trace is non-decreasing in noise energy") {
        for (std::uint64_t seed : {21, 22, 23}) {
            double prev = -1.0;
            for (double e : {5.0, 20.0, 80.0}) {
                auto noisy = clean;
                noisy.seed = seed;
                noisy.noise_energy = e;
                const auto r = drift_experiment(clean, noisy, 16);
                CHECK(r.trace_raw_noisy >= prev);
                prev = r.trace_raw_noisy;
            }
        }
    }
    SECTION("argument checks") {
        auto other = clean;
        other.d = 64;
        CHECK_THROWS_AS(drift_experiment(clean, other, 16), Error);
        CHECK_THROWS_AS(drift_experiment(clean, clean, 15), Error);
    }
}
