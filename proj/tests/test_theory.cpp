#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "fcba/rng.hpp"
#include "fcba/theory.hpp"

using namespace fcba;

namespace {

ReactionParams random_params(CounterStream& s) {
    const double a = 0.999 * s.next(), b = (1 - a) * s.next();
    const double al = 0.999 * s.next(), be = (1 - al) * s.next();
    return validate_params(a, b, al, be);
}

const double third = 1.0 / 3;

}  // namespace

TEST_CASE("p_c examples") {
    CHECK(pc_closed_form(validate_params(0, 0, 0, 0)) == 0.25);
    CHECK(pc_closed_form(validate_params(third, third, third, third)) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(pc_closed_form(validate_params(0, 0, 0, 0.5)) == doctest::Approx(1.0 / 11).epsilon(1e-14));
}

TEST_CASE("p_c lies below 1 and is negative only when coalescence dominates") {
    CounterStream s(1);
    for (int i = 0; i < 10000; ++i) {
        auto P = random_params(s);
        const double pc = pc_closed_form(P);
        REQUIRE(pc < 1.0);
        REQUIRE((pc <= 0.0) == (P.b * (1 - P.alpha) >= (1 - P.beta) * (1 - P.beta)));
    }
    const auto N = validate_params(0, 0.9, 0, 0.1);
    CHECK(pc_closed_form(N) < 0.0);
    CHECK(solve_q(N, 0.0).q < 1.0);
    CHECK(solve_q(N, 0.0).branch == QBranch::SupercriticalRoot);
}

TEST_CASE("classical g reduces to 1/2 - 2u") {
    const auto P = validate_params(0, 0, 0, 0);
    for (double u : {0.0, 0.1, 0.25, 0.7, 1.0}) CHECK(g_eval(P, u, 1.0).g == doctest::Approx(0.5 - 2 * u).epsilon(1e-13));
}

TEST_CASE("g parts identity") {
    CounterStream s(2);
    for (int i = 0; i < 100; ++i) {
        auto P = random_params(s);
        const double u = s.next(), v = s.next();
        auto parts = g_eval(P, u, v);
        CHECK(parts.g == doctest::Approx(-v + (parts.f1 + parts.f2) / parts.f3).epsilon(1e-12));
    }
}

TEST_CASE("g vanishes at (p_c, 1) and is affine in u") {
    CounterStream s(3);
    double worst = 0.0, worst_second = 0.0;
    for (int i = 0; i < 10000; ++i) {
        auto P = random_params(s);
        worst = std::max(worst, std::abs(g_eval(P, pc_closed_form(P), 1.0).g));
        const double g0 = g_eval(P, 0.2, 1.0).g, g1 = g_eval(P, 0.5, 1.0).g, g2 = g_eval(P, 0.8, 1.0).g;
        worst_second = std::max(worst_second, std::abs(g0 - 2 * g1 + g2));
    }
    CHECK(worst < 1e-9);
    CHECK(worst_second < 1e-12);
}

TEST_CASE("g(1, 0) = 0") {
    CounterStream s(4);
    for (int i = 0; i < 1000; ++i) REQUIRE(std::abs(g_eval(random_params(s), 1.0, 0.0).g) < 1e-12);
}

TEST_CASE("printed g has its root at 2/13 for all one third") {
    const auto P = validate_params(third, third, third, third);
    CHECK(pc_from_g(P, GForm::AsPrinted) == doctest::Approx(2.0 / 13).epsilon(1e-12));
    CHECK(pc_from_g(P, GForm::Recursion) == doctest::Approx(0.125).epsilon(1e-12));
    const auto C = validate_params(0, 0, 0.3, 0.4);
    CHECK(g_eval(C, 0.4, 0.6, GForm::AsPrinted).g == doctest::Approx(g_eval(C, 0.4, 0.6).g).epsilon(1e-12));
}

TEST_CASE("solve_q boundary cases") {
    CounterStream s(5);
    for (int i = 0; i < 200; ++i) {
        auto P = random_params(s);
        const double pc = std::max(0.0, pc_closed_form(P));
        if (pc > 0.0) {
            auto lo = solve_q(P, pc * s.next());
            CHECK(lo.q == 1.0);
            CHECK(lo.branch == QBranch::SubcriticalOne);
            CHECK(solve_q(P, pc).q == 1.0);
        }
        auto one = solve_q(P, 1.0);
        CHECK(one.q == 0.0);
        CHECK(one.branch == QBranch::SupercriticalRoot);
    }
    CHECK_THROWS_AS(solve_q(validate_params(0, 0, 0, 0), 1.5), std::invalid_argument);
}

TEST_CASE("solve_q is decreasing beyond p_c and has a small residual") {
    CounterStream s(6);
    for (int i = 0; i < 50; ++i) {
        auto P = random_params(s);
        const double pc = std::max(0.0, pc_closed_form(P));
        double prev = 1.0;
        for (double p = pc + 1e-3; p <= 1.0; p += 0.01) {
            auto sol = solve_q(P, p);
            REQUIRE(sol.q < prev);
            REQUIRE(sol.q >= 0.0);
            REQUIRE(sol.residual < 1e-9);
            prev = sol.q;
        }
    }
}

TEST_CASE("solve_q is continuous") {
    CounterStream s(7);
    for (int i = 0; i < 20; ++i) {
        auto P = random_params(s);
        const double pc = std::max(0.0, pc_closed_form(P));
        const double p = pc + (1 - pc) * (0.05 + 0.9 * s.next());
        CHECK(std::abs(solve_q(P, p + 1e-6).q - solve_q(P, p).q) < 1e-3);
    }
}

TEST_CASE("solve_q solves the first-particle recursion") {
    CounterStream s(8);
    for (int i = 0; i < 200; ++i) {
        auto P = random_params(s);
        if (P.c < 1e-3) continue;
        const double pc = std::max(0.0, pc_closed_form(P));
        const double p = pc + (1 - pc) * (0.02 + 0.96 * s.next());
        const double q = solve_q(P, p).q;
        REQUIRE(std::abs(recursion_residual(P, p, q)) < 1e-8);
    }
    const auto P = validate_params(0, 0, 0, 0);
    CHECK(std::abs(recursion_residual(P, 0.2, 1.0)) < 1e-12);
}

TEST_CASE("s and r closed forms") {
    const auto Z = validate_params(0, 0, 0, 0);
    const auto P = validate_params(0.2, 0.2, 0.2, 0.3);
    CHECK(s_closed(P, 0.3, 0.1, 0.0) == 0.0);
    CHECK(r_closed(P, 0.3, 0.1, 0.0) == 0.0);
    CHECK(s_closed(Z, 0.3, 0.0, 1.0) == doctest::Approx(0.15));
    CHECK(r_closed(Z, 0.3, 0.0, 1.0) == 0.0);
    CHECK(r_closed(Z, 0.3, 0.1, 0.5) == doctest::Approx(0.4 * 0.25));
    CHECK(r_closed_as_printed(Z, 0.3, 0.1, 0.5) == 0.0);
    const double q = 0.6, d = 1 - 0.3 * q;
    CHECK(s_closed(P, 0.3, 0.1, q) == doctest::Approx(0.4 * 0.8 * 0.7 * q * q / (2 * d * d)));
    CHECK(r_closed(P, 0.3, 0.1, q) == doctest::Approx(0.4 * 0.8 * q * (1 - q) / (d * d)));
}

TEST_CASE("rec2 closed form") {
    CHECK(rec2_closed(validate_params(0.2, 0.2, 0.2, 0.3), 0.0, 0.5) == 0.0);
    CHECK(rec2_closed(validate_params(0, 0, 0, 0), 0.3, 0.6) == doctest::Approx(0.3 * 0.36));
    CHECK(rec2_closed(validate_params(0, 0, 0.3, 0.5), 0.4, 0.6) == doctest::Approx(0.144).epsilon(1e-12));
}

TEST_CASE("S and triple sum") {
    CHECK(S_closed(0.0, 0.7) == 0.0);
    CHECK(triple_sum_closed(0.0, 0.7) == 0.0);
    CHECK(S_closed(0.5, 1.0) == doctest::Approx(0.5));
    CHECK(triple_sum_closed(0.5, 1.0) == doctest::Approx(0.25));
    CHECK(S_closed(0.5, 0.5) == doctest::Approx(1.0 / 18));
}

TEST_CASE("p_hat from mutual") {
    CHECK(hatp_from_mutual(validate_params(0.3, 0, 0, 0), 0.4) == 0.0);
    CHECK(hatp_from_mutual(validate_params(0, 0.5, 0, 0), 0.3) == doctest::Approx(0.3));
    CHECK(hatp_from_mutual(validate_params(third, third, 0, 0), 0.2) == doctest::Approx(0.2));
    CHECK_THROWS_AS(hatp_from_mutual(validate_params(0.5, 0.5, 0, 0), 0.2), DegenerateError);
}

TEST_CASE("truncation index and tail") {
    for (double beta : {0.1, 0.3, 0.5, 0.9}) {
        const int K = truncation_index(beta);
        auto bound = [&](int k) { return std::pow(beta, k) * (k + 1) / ((1 - beta) * (1 - beta)); };
        CHECK(bound(K) < 1e-6);
        if (K > 0) CHECK(bound(K - 1) >= 1e-6);
        CHECK(truncation_tail(beta, K) < 1e-5);
    }
    CHECK(truncation_tail(0.0, truncation_index(0.0)) == 0.0);
}
