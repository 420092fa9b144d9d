#include <doctest.h>

#include <cmath>

#include "fcba/model.hpp"
#include "fcba/rng.hpp"
#include "fcba/stats.hpp"

using namespace fcba;

TEST_CASE("validate_params fills c and xi") {
    auto r = validate_params(0, 0, 0, 0);
    CHECK(r.c == 1.0);
    CHECK(r.xi == 1.0);
    auto t = validate_params(1.0 / 3, 1.0 / 3, 1.0 / 3, 1.0 / 3);
    CHECK(t.c == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(t.xi == doctest::Approx(1.0 / 3).epsilon(1e-15));
}

TEST_CASE("validate_params rejects violations and names them") {
    try {
        validate_params(0.7, 0.4, 0, 0);
        FAIL("expected an error");
    } catch (const ConstraintError& e) {
        CHECK(std::string(e.what()).find("a + b <= 1") != std::string::npos);
    }
    CHECK_THROWS_AS(validate_params(1.0, 0, 0, 0), ConstraintError);
    CHECK_THROWS_AS(validate_params(0, 0, -0.1, 0), ConstraintError);
    CHECK_THROWS_AS(validate_params(0, 0, 0.6, 0.6), ConstraintError);
    CHECK_THROWS_AS(validate_params(NAN, 0, 0, 0), ConstraintError);
}

TEST_CASE("three blockades at p = 1") {
    InitialConfig cfg{3, Side::RightHalfLine, 1.0, ExponentialSpacing{1.0}, 5};
    auto ps = sample_initial_config(cfg);
    REQUIRE(ps.size() == 3);
    for (const auto& p : ps) CHECK(p.species == Species::Blockade);
}

TEST_CASE("sampling is deterministic per seed") {
    InitialConfig cfg{10000, Side::RightHalfLine, 0.25, ExponentialSpacing{1.0}, 1234};
    auto x = sample_initial_config(cfg);
    auto y = sample_initial_config(cfg);
    REQUIRE(x.size() == y.size());
    bool same = true;
    for (std::size_t i = 0; i < x.size(); ++i)
        same = same && x[i].position == y[i].position && x[i].species == y[i].species && x[i].site == y[i].site;
    CHECK(same);
}

TEST_CASE("positions strictly increasing over many configs") {
    for (std::uint64_t s = 0; s < 1000; ++s) {
        const Spacing sp = (s % 2) ? Spacing{UniformSpacing{0.5, 1.5}} : Spacing{ExponentialSpacing{1.0}};
        InitialConfig cfg{200, (s % 3) ? Side::RightHalfLine : Side::TwoSided, 0.3, sp, s};
        auto ps = sample_initial_config(cfg);
        REQUIRE(ps.size() == 200);
        for (std::size_t i = 1; i < ps.size(); ++i) REQUIRE(ps[i].position > ps[i - 1].position);
        if (cfg.side == Side::RightHalfLine) REQUIRE(ps.front().position > 0.0);
    }
}

TEST_CASE("two-sided configuration has site 0 at the origin") {
    InitialConfig cfg{101, Side::TwoSided, 0.3, ExponentialSpacing{1.0}, 9};
    auto ps = sample_initial_config(cfg);
    REQUIRE(ps.size() == 101);
    int zero = 0;
    for (const auto& p : ps)
        if (p.site == 0) {
            ++zero;
            CHECK(p.position == 0.0);
        }
    CHECK(zero == 1);
}

TEST_CASE("doubling the window keeps the first n particles") {
    InitialConfig a{500, Side::RightHalfLine, 0.3, ExponentialSpacing{1.0}, 77};
    InitialConfig b = a;
    b.n = 1000;
    auto x = sample_initial_config(a);
    auto y = sample_initial_config(b);
    for (std::size_t i = 0; i < x.size(); ++i) {
        REQUIRE(x[i].position == y[i].position);
        REQUIRE(x[i].species == y[i].species);
    }
}

TEST_CASE("species frequencies at n = 1e6") {
    const double p = 0.25;
    InitialConfig cfg{1000000, Side::RightHalfLine, p, ExponentialSpacing{1.0}, 2024};
    auto ps = sample_initial_config(cfg);
    std::int64_t counts[3] = {0, 0, 0};
    for (const auto& x : ps) {
        if (x.species == Species::Blockade) ++counts[0];
        else if (x.species == Species::LeftArrow) ++counts[1];
        else ++counts[2];
    }
    const double n = 1e6;
    const double sigma = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(counts[0] / n - p) < 4 * sigma);
    const double probs[3] = {p, (1 - p) / 2, (1 - p) / 2};
    CHECK(chi_square_statistic(counts, probs) < chi_square_critical(2, 1e-3));
}

TEST_CASE("invalid configurations") {
    CHECK_THROWS_AS(validate_config({0, Side::RightHalfLine, 0.2, ExponentialSpacing{1.0}, 1}), ConstraintError);
    CHECK_THROWS_AS(validate_config({5, Side::RightHalfLine, 1.2, ExponentialSpacing{1.0}, 1}), ConstraintError);
    CHECK_THROWS_AS(validate_config({5, Side::RightHalfLine, 0.2, ExponentialSpacing{0.0}, 1}), ConstraintError);
    CHECK_THROWS_AS(validate_config({5, Side::RightHalfLine, 0.2, UniformSpacing{-1.0, 1.0}, 1}), ConstraintError);
    CHECK_THROWS_AS(validate_config({5, Side::RightHalfLine, 0.2, UniformSpacing{1.0, 1.0}, 1}), ConstraintError);
}
