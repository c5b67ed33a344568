#include <catch2/catch_amalgamated.hpp>

#include "l2v/error.hpp"
#include "l2v/latrep.hpp"
#include "oracles/oracles.hpp"

using namespace l2v;
using namespace l2v::latrep;
using Catch::Approx;

namespace {

store::ActivationMatrix activation(Matrix values, store::Role role, int layer = 0) {
    store::ActivationMatrix m;
    m.values = std::move(values);
    m.role = role;
    m.layer = layer;
    m.source_tag = "test";
    return m;
}

DirectionSet dirs_of(std::size_t n, std::size_t d, std::vector<double> data) {
    return DirectionSet{Matrix(n, d, std::move(data)), 0, "test", "test"};
}

DirectionSet random_dirs(oracle::Rng& rng, std::size_t n, std::size_t d) {
    auto data = rng.normals(n * d);
    // Anisotropic scaling so eigenvalues are distinct.
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= 1.0 + static_cast<double>(i % d);
    return dirs_of(n, d, std::move(data));
}

std::vector<std::vector<double>> rows_of(const Matrix& m) {
    std::vector<std::vector<double>> out;
    for (std::size_t r = 0; r < m.rows(); ++r) out.emplace_back(m.row(r).begin(), m.row(r).end());
    return out;
}

}  // namespace

TEST_CASE("direction_set", "[latrep]") {
    oracle::Rng rng(41);
    SECTION("pos == neg gives zeros") {
        Matrix x(3, 4, rng.normals(12));
        const auto u = direction_set(activation(x, store::Role::positive), activation(x, store::Role::negative));
        for (double v : u.rows.data()) CHECK(v == 0.0);
    }
    SECTION("hand subtraction") {
        const auto u = direction_set(activation(Matrix(1, 2, {3, 1}), store::Role::positive),
                                     activation(Matrix(1, 2, {1, 1}), store::Role::negative));
        CHECK(u.rows == Matrix(1, 2, {2, 0}));
    }
    SECTION("row 7 of a 100x512 pair equals an independent loop") {
        Matrix p(100, 512, rng.normals(100 * 512)), q(100, 512, rng.normals(100 * 512));
        const auto u = direction_set(activation(p, store::Role::positive, 5), activation(q, store::Role::negative, 5));
        CHECK(u.layer == 5);
        for (std::size_t c = 0; c < 512; ++c) REQUIRE(u.rows(7, c) == p(7, c) - q(7, c));
    }
    SECTION("linearity in a common scale") {
        Matrix p(4, 6, rng.normals(24)), q(4, 6, rng.normals(24));
        const double a = -2.75;
        Matrix ap = p, aq = q;
        for (auto& v : ap.data()) v *= a;
        for (auto& v : aq.data()) v *= a;
        const auto base = direction_set(activation(p, store::Role::positive), activation(q, store::Role::negative));
        const auto scaled = direction_set(activation(ap, store::Role::positive), activation(aq, store::Role::negative));
        for (std::size_t i = 0; i < base.rows.data().size(); ++i) {
            CHECK(scaled.rows.data()[i] == Approx(a * base.rows.data()[i]).margin(1e-12));
        }
    }
    SECTION("errors") {
        Matrix x(2, 3), y(3, 3);
        CHECK_THROWS_MATCHES(direction_set(activation(x, store::Role::positive), activation(y, store::Role::negative)),
                             Error, Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::dimension; }));
        CHECK_THROWS_MATCHES(direction_set(activation(x, store::Role::negative), activation(x, store::Role::negative)),
                             Error, Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::format; }));
        CHECK_THROWS_MATCHES(direction_set(activation(x, store::Role::positive, 1), activation(x, store::Role::negative, 2)),
                             Error, Catch::Matchers::Predicate<Error>([](const Error& e) { return e.kind() == ErrorKind::dimension; }));
    }
}

TEST_CASE("mean_pattern", "[latrep]") {
    CHECK(mean_pattern(dirs_of(1, 3, {1, -2, 3})).values == std::vector<double>{1, -2, 3});
    CHECK(mean_pattern(dirs_of(2, 2, {1, 0, 0, 1})).values == std::vector<double>{0.5, 0.5});
    const auto sym = mean_pattern(dirs_of(2, 3, {1, 2, 3, -1, -2, -3})).values;
    for (double v : sym) CHECK(v == 0.0);
    CHECK_THROWS_AS(mean_pattern(DirectionSet{}), Error);

    oracle::Rng rng(42);
    Matrix p(7, 5, rng.normals(35)), q(7, 5, rng.normals(35));
    const auto u = direction_set(activation(p, store::Role::positive), activation(q, store::Role::negative));
    const auto v = mean_pattern(u).values;
    for (std::size_t c = 0; c < 5; ++c) {
        double mp = 0.0, mq = 0.0;
        for (std::size_t r = 0; r < 7; ++r) {
            mp += p(r, c) / 7.0;
            mq += q(r, c) / 7.0;
        }
        CHECK(v[c] == Approx(mp - mq).margin(1e-12));
    }
}

TEST_CASE("covariance_trace", "[latrep]") {
    CHECK(covariance_trace(dirs_of(3, 2, {1, 2, 1, 2, 1, 2})) == 0.0);
    CHECK(covariance_trace(dirs_of(2, 2, {1, 0, -1, 0})) == Approx(1.0));
    CHECK(covariance_trace(dirs_of(4, 2, {1, 0, -1, 0, 0, 1, 0, -1})) == Approx(1.0));
    CHECK_THROWS_AS(covariance_trace(DirectionSet{}), Error);

    oracle::Rng rng(43);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = rng.index(1, 40), d = rng.index(1, 32);
        const auto u = random_dirs(rng, n, d);
        const double tr = covariance_trace(u);
        CHECK(tr == Approx(oracle::explicit_covariance_trace(rows_of(u.rows))).epsilon(1e-9).margin(1e-300));

        auto shifted = u;
        const auto offset = rng.normals(d);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < d; ++c) shifted.rows(r, c) += 10.0 * offset[c];
        CHECK(covariance_trace(shifted) == Approx(tr).epsilon(1e-9).margin(1e-9));
    }
}

TEST_CASE("pca_fit examples", "[latrep][pca]") {
    SECTION("two points on the x axis") {
        const auto u = dirs_of(2, 2, {0, 0, 2, 0});
        const auto model = pca_fit(u, 1);
        const auto [l1, l2] = oracle::eig2(1.0, 0.0, 0.0);  // covariance [[1,0],[0,0]]
        CHECK(model.explained_variance[0] == Approx(l1));
        CHECK(l2 == 0.0);
        CHECK(model.components(0, 0) == Approx(1.0));
        CHECK(model.components(0, 1) == Approx(0.0).margin(1e-12));
        const auto proj = pca_project(model, u.rows);
        CHECK(proj(0, 0) == Approx(-1.0));
        CHECK(proj(1, 0) == Approx(1.0));
    }
    SECTION("isotropic cross") {
        const auto model = pca_fit(dirs_of(4, 2, {1, 0, -1, 0, 0, 1, 0, -1}), 2);
        const auto [l1, l2] = oracle::eig2(0.5, 0.0, 0.5);
        CHECK(model.explained_variance[0] == Approx(l1));
        CHECK(model.explained_variance[1] == Approx(l2));
    }
    SECTION("identical rows give zero variance") {
        const auto model = pca_fit(dirs_of(3, 4, {1, 2, 3, 4, 1, 2, 3, 4, 1, 2, 3, 4}), 1);
        CHECK(model.explained_variance[0] == Approx(0.0).margin(1e-24));
    }
    SECTION("correlated 2-D cloud matches the closed-form eigenvalues") {
        oracle::Rng rng(44);
        auto u = random_dirs(rng, 50, 2);
        for (std::size_t r = 0; r < 50; ++r) u.rows(r, 1) += 0.7 * u.rows(r, 0);
        const auto mean = mean_pattern(u).values;
        double a = 0, b = 0, c = 0;
        for (std::size_t r = 0; r < 50; ++r) {
            const double x = u.rows(r, 0) - mean[0], y = u.rows(r, 1) - mean[1];
            a += x * x / 50;
            b += x * y / 50;
            c += y * y / 50;
        }
        const auto [l1, l2] = oracle::eig2(a, b, c);
        const auto model = pca_fit(u, 2);
        CHECK(model.explained_variance[0] == Approx(l1).epsilon(1e-10));
        CHECK(model.explained_variance[1] == Approx(l2).epsilon(1e-10));
    }
    SECTION("argument checks") {
        const auto u = dirs_of(3, 2, {1, 2, 3, 4, 5, 6});
        CHECK_THROWS_AS(pca_fit(u, 0), Error);
        CHECK_THROWS_AS(pca_fit(u, 3), Error);
        CHECK_THROWS_AS(pca_fit(dirs_of(1, 2, {1, 2}), 1), Error);
        const auto model = pca_fit(u, 1);
        CHECK_THROWS_AS(pca_project(model, Matrix(1, 3)), Error);
    }
}

TEST_CASE("pca properties", "[latrep][pca][property]") {
    oracle::Rng rng(45);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = rng.index(2, 30), d = rng.index(1, 24);
        const auto u = random_dirs(rng, n, d);
        const std::size_t full = std::min(n, d);
        const auto model = pca_fit(u, full);
        INFO("n=" << n << " d=" << d);

        double sum = 0.0;
        for (std::size_t i = 0; i < full; ++i) {
            sum += model.explained_variance[i];
            CHECK(model.explained_variance[i] >= 0.0);
            if (i > 0) CHECK(model.explained_variance[i] <= model.explained_variance[i - 1]);
        }
        CHECK(sum == Approx(covariance_trace(u)).epsilon(1e-9));

        for (std::size_t a = 0; a < full; ++a) {
            for (std::size_t b = 0; b < full; ++b) {
                CHECK(dot(model.components.row(a), model.components.row(b)) ==
                      Approx(a == b ? 1.0 : 0.0).margin(1e-9));
            }
            // sign convention
            std::size_t arg = 0;
            for (std::size_t c = 1; c < d; ++c)
                if (std::abs(model.components(a, c)) > std::abs(model.components(a, arg))) arg = c;
            CHECK(model.components(a, arg) >= 0.0);
        }

        const auto proj = pca_project(model, u.rows);
        // projection columns are uncorrelated, with variance equal to the eigenvalue
        for (std::size_t a = 0; a < full; ++a) {
            for (std::size_t b = 0; b < full; ++b) {
                double cov = 0.0;
                for (std::size_t r = 0; r < n; ++r) cov += proj(r, a) * proj(r, b) / static_cast<double>(n);
                const double scale = std::max(1.0, model.explained_variance[0]);
                CHECK(cov / scale == Approx(a == b ? model.explained_variance[a] / scale : 0.0).margin(1e-9));
            }
        }

        if (d <= n) {
            // full-rank reconstruction
            for (std::size_t r = 0; r < n; ++r) {
                for (std::size_t c = 0; c < d; ++c) {
                    double rec = model.mean[c];
                    for (std::size_t a = 0; a < d; ++a) rec += proj(r, a) * model.components(a, c);
                    CHECK(rec == Approx(u.rows(r, c)).margin(1e-9));
                }
            }
        }

        Matrix at_mean(1, d, model.mean);
        const auto centered = pca_project(model, at_mean);
        for (double v : centered.data()) CHECK(v == Approx(0.0).margin(1e-12));
    }
}
