#include <doctest.h>

#include <vector>

#include "fcba/estimators.hpp"
#include "fcba/theory.hpp"

using namespace fcba;

TEST_CASE("verdict rule") {
    CHECK(decide(0.01, 0.01, 0.0, 0.0) == Verdict::Pass);
    CHECK(decide(-0.035, 0.01, 0.0, 0.0) == Verdict::Fail);
    CHECK(decide(0.035, 0.01, 0.006, 0.0) == Verdict::Pass);
    CHECK(decide(0.035, 0.01, 0.0, 0.01) == Verdict::Inconclusive);
}

TEST_CASE("proportion estimate invariants") {
    for (auto [y, n, u] : std::vector<std::tuple<int, int, int>>{{0, 10, 0}, {5, 5, 3}, {10, 0, 1}, {40, 50, 10}}) {
        auto e = proportion_estimate(y, n, u);
        CHECK(e.ci_low <= e.point);
        CHECK(e.point <= e.ci_high);
        CHECK(e.uncertain_low <= e.point);
        CHECK(e.point <= e.uncertain_high);
        CHECK(e.trials == y + n + u);
    }
    auto none = proportion_estimate(0, 0, 4);
    CHECK(none.inconclusive);
    CHECK_FALSE(none.diagnostics.empty());
    CHECK_THROWS(proportion_estimate(0, 0, 0));
}

TEST_CASE("bracket from classes") {
    using C = PhaseClass;
    const std::vector<double> grid{0.1, 0.2, 0.3, 0.4};
    auto b = bracket_from_classes(grid, {C::Subcritical, C::Subcritical, C::Supercritical, C::Supercritical});
    CHECK(b.p_lower == 0.2);
    CHECK(b.p_upper == 0.3);
    CHECK(b.warnings.empty());
    CHECK(b.contains(0.25));

    auto u = bracket_from_classes(grid, {C::Subcritical, C::Undetermined, C::Supercritical, C::Supercritical});
    CHECK(u.p_lower == 0.1);
    CHECK(u.p_upper == 0.3);

    auto above = bracket_from_classes(grid, {C::Supercritical, C::Supercritical, C::Supercritical, C::Supercritical});
    CHECK(above.p_lower == 0.1);
    CHECK(above.p_upper == 0.1);
    CHECK_FALSE(above.warnings.empty());

    auto mixed = bracket_from_classes(grid, {C::Subcritical, C::Supercritical, C::Subcritical, C::Supercritical});
    CHECK(mixed.p_lower == 0.1);
    CHECK(mixed.p_upper == 0.4);
    CHECK_FALSE(mixed.warnings.empty());

    CHECK_THROWS_AS(bracket_from_classes({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(bracket_from_classes({0.2, 0.1}, {C::Subcritical, C::Subcritical}), std::invalid_argument);
    CHECK_THROWS_AS(empirical_pc(validate_params(0, 0, 0, 0), {}, PcOptions{}), std::invalid_argument);
}

TEST_CASE("results do not depend on the worker count") {
    const auto P = validate_params(0.2, 0.2, 0.2, 0.3);
    RunOptions one{2000, 200, 9, ExponentialSpacing{1.0}, {}, 1};
    RunOptions four = one;
    four.workers = 4;
    auto x = identity_suite(P, 0.3, 0, 3, one);
    auto y = identity_suite(P, 0.3, 0, 3, four);
    CHECK(x.q.point == y.q.point);
    CHECK(x.q.successes == y.q.successes);
    REQUIRE(x.reports.size() == y.reports.size());
    for (std::size_t i = 0; i < x.reports.size(); ++i) {
        CHECK(x.reports[i].name == y.reports[i].name);
        CHECK(x.reports[i].difference == y.reports[i].difference);
        CHECK(x.reports[i].se == y.reports[i].se);
    }
}

TEST_CASE("q at p = 1 is zero and fully certified") {
    RunOptions opt{1000, 100, 3, ExponentialSpacing{1.0}, {}, 1};
    auto e = estimate_q(validate_params(0.2, 0.2, 0.2, 0.3), 1.0, opt);
    CHECK(e.point == 0.0);
    CHECK(e.certified_fraction == 1.0);
}

TEST_CASE("q at p = 0 is one") {
    RunOptions opt{10000, 100, 4, ExponentialSpacing{1.0}, {}, 1};
    auto e = estimate_q(validate_params(0, 0, 0, 0), 0.0, opt);
    CHECK(e.uncertain_low > 0.95);
}

TEST_CASE("S and triple sum vanish without weak collisions") {
    RunOptions opt{2000, 200, 5, ExponentialSpacing{1.0}, {}, 1};
    const auto P = validate_params(0.2, 0.2, 0.3, 0.0);
    CHECK(estimate_S(P, 0.3, 0, opt).mc_value.point == 0.0);
    CHECK(estimate_triple_sum(P, 0.3, 0, opt).mc_value.point == 0.0);
}

TEST_CASE("identity suite at a moderate size") {
    const auto P = validate_params(0.2, 0.2, 0.2, 0.3);
    RunOptions opt{5000, 3000, 11, ExponentialSpacing{1.0}, {}, 1};
    auto suite = identity_suite(P, 0.3, 0, 4, opt);
    CHECK(suite.q.point == doctest::Approx(solve_q(P, 0.3).q).epsilon(0.05));
    for (const auto& r : suite.reports) {
        INFO(r.name << " diff=" << r.difference << " se=" << r.se << " band=" << r.band);
        CHECK(r.verdict != Verdict::Fail);
    }
}

TEST_CASE("survival fraction rises with p") {
    PcOptions opt;
    opt.trials = 40;
    opt.workers = 1;
    const auto P = validate_params(0, 0, 0, 0);
    auto lo = survival_point(P, 0.15, 4000, opt);
    auto hi = survival_point(P, 0.4, 4000, opt);
    CHECK(lo.fraction < hi.fraction);
    CHECK(hi.ci_low > 0.0);
    CHECK(lo.ci_low <= lo.fraction);
    CHECK(lo.fraction <= lo.ci_high);
}
