#include <doctest.h>

#include <cmath>
#include <vector>

#include "fcba/engine.hpp"
#include "fcba/rng.hpp"
#include "fcba/stats.hpp"
#include "fcba/theory.hpp"

using namespace fcba;

namespace {

InitialConfig half_line(std::int64_t n) { return {n, Side::RightHalfLine, 0.0, ExponentialSpacing{1.0}, 1}; }

std::vector<SampledParticle> place(std::initializer_list<std::pair<double, Species>> xs) {
    std::vector<SampledParticle> out;
    std::int64_t site = 1;
    for (auto [x, s] : xs) out.push_back({site++, x, s});
    return out;
}

constexpr auto L = Species::LeftArrow;
constexpr auto R = Species::RightArrow;
constexpr auto B = Species::Blockade;

}  // namespace

TEST_CASE("forced mutual pair") {
    auto ps = place({{0.0, R}, {2.0, L}});
    KeyedCollisionRng rng(1);
    auto t = run(ps, half_line(2), validate_params(0, 0, 0, 0), rng);
    REQUIRE(t.events.size() == 1);
    CHECK(t.events[0].kind == EventKind::Mutual);
    CHECK(t.events[0].time == doctest::Approx(1.0));
    CHECK(t.events[0].position == doctest::Approx(1.0));
    CHECK(t.survivors.empty());
    validate_trace(t);
}

TEST_CASE("b = 1 coalesces into a generated blockade") {
    auto ps = place({{0.0, R}, {2.0, L}});
    KeyedCollisionRng rng(1);
    auto t = run(ps, half_line(2), validate_params(0, 1 - 1e-12, 0, 0), rng);
    REQUIRE(t.events.size() == 1);
    CHECK(t.events[0].kind == EventKind::CoalesceToBlockade);
    REQUIRE(t.events[0].created_id.has_value());
    const Particle& g = t.particles.at(static_cast<std::size_t>(*t.events[0].created_id));
    CHECK(g.species == Species::GeneratedBlockade);
    CHECK(g.alive);
    CHECK(g.birth_position == doctest::Approx(1.0));
    REQUIRE(t.survivors.size() == 1);
    CHECK(t.survivors[0].id == g.id);
    validate_trace(t);
}

TEST_CASE("blockade survives two weak hits") {
    auto ps = place({{0.0, R}, {1.0, B}, {3.0, L}});
    ScriptedCollisionRng rng({0.5, 0.5});
    auto t = run(ps, half_line(3), validate_params(0, 0, 0, 1 - 1e-9), rng);
    REQUIRE(t.events.size() == 2);
    CHECK(t.events[0].kind == EventKind::WeakFromLeft);
    CHECK(t.events[0].time == doctest::Approx(1.0));
    CHECK(t.events[1].kind == EventKind::WeakFromRight);
    CHECK(t.events[1].time == doctest::Approx(2.0));
    const Particle& b = t.particles[1];
    CHECK(b.alive);
    CHECK(b.weak_hits_left + b.weak_hits_right == 2);
    CHECK(b.weak_hits_left == 1);
    CHECK(b.weak_hits_right == 1);
    validate_trace(t);
}

TEST_CASE("strong hit keeps the arrow's id") {
    auto ps = place({{1.0, B}, {3.0, L}});
    ScriptedCollisionRng rng({0.1});
    auto t = run(ps, half_line(2), validate_params(0, 0, 0.5, 0.2), rng);
    REQUIRE(t.events.size() == 1);
    CHECK(t.events[0].kind == EventKind::StrongLeftSurvives);
    CHECK_FALSE(t.particles[0].alive);
    CHECK(t.particles[1].alive);
    REQUIRE(t.survivors.size() == 1);
    CHECK(t.survivors[0].id == 1);
    auto* crossed = std::get_if<CrossedLeftOfOrigin>(&t.survivors[0].exit);
    REQUIRE(crossed != nullptr);
    CHECK(crossed->time == doctest::Approx(3.0));
}

TEST_CASE("origin outcome examples") {
    KeyedCollisionRng rng(3);
    const auto params = validate_params(0, 0, 0, 0);
    {
        auto t = run(place({{2.5, L}}), half_line(1), params, rng);
        auto o = origin_outcome(t);
        CHECK(o.kind == OriginOutcome::Kind::VisitedCertified);
        REQUIRE(o.first_visit_time.has_value());
        CHECK(*o.first_visit_time == doctest::Approx(2.5));
    }
    {
        auto t = run(place({{2.5, R}}), half_line(1), params, rng);
        CHECK(origin_outcome(t).kind == OriginOutcome::Kind::Uncertain);
    }
    {
        auto t = run(place({{1.0, L}, {2.0, R}}), half_line(2), params, rng);
        auto o = origin_outcome(t);
        CHECK(o.kind == OriginOutcome::Kind::VisitedCertified);
        CHECK(*o.first_visit_time == doctest::Approx(1.0));
    }
    {
        InitialConfig two = half_line(3);
        two.side = Side::TwoSided;
        auto t = run(place({{-1.0, R}, {0.0, B}, {1.0, L}}), two, params, rng);
        CHECK_THROWS_AS(origin_outcome(t), std::logic_error);
    }
}

TEST_CASE("many surviving blockades certify no visit") {
    std::vector<SampledParticle> ps;
    for (int k = 1; k <= 40; ++k) ps.push_back({k, static_cast<double>(k), B});
    KeyedCollisionRng rng(1);
    auto t = run(ps, half_line(40), validate_params(0, 0, 0, 0), rng);
    CHECK(origin_outcome(t).kind == OriginOutcome::Kind::NotVisitedCertified);
    auto c = certify(t);
    CHECK(c.shielded);
    CHECK(c.shield_blockades == 20);
    CHECK(c.shield_position == doctest::Approx(5.0));
}

TEST_CASE("visit sequence examples") {
    KeyedCollisionRng rng(5);
    const auto params = validate_params(0, 0, 0, 0);
    auto t = run(place({{1.0, R}, {3.0, L}}), half_line(2), params, rng);
    auto right = visit_sequence(t, 2.0, VisitSide::FromRight);
    REQUIRE(right.from_right_times.size() == 1);
    CHECK(right.from_right_times[0] == doctest::Approx(1.0));
    auto left = visit_sequence(t, 2.0, VisitSide::FromLeft);
    REQUIRE(left.from_left_times.size() == 1);
    CHECK(left.from_left_times[0] == doctest::Approx(1.0));
    auto none = visit_sequence(t, 5.0, VisitSide::FromRight);
    CHECK(none.from_right_times.empty());

    ScriptedCollisionRng scripted({0.9});
    auto u = run(place({{1.0, R}, {3.0, L}}), half_line(2), params, scripted);
    CHECK_THROWS_AS(visit_sequence(u, 2.0, VisitSide::FromRight), std::logic_error);
}

TEST_CASE("first right arrow killed by a blockade, then the origin is visited") {
    auto ps = place({{1.0, R}, {2.0, B}, {4.0, L}});
    KeyedCollisionRng rng(1);
    auto t = run(ps, half_line(3), validate_params(0, 0, 0, 0), rng);
    auto f = classify_trial(t);
    CHECK(f.first_species == R);
    CHECK(f.r1_fate == RightArrowFate::MutualWithBlockade);
    CHECK(f.r1_killed_by_original_blockade() == Tri::True);
    CHECK(f.visited == Tri::True);
    CHECK(f.s_event() == Tri::True);
    CHECK(f.r_event() == Tri::False);
    CHECK(f.phat_event() == Tri::False);
}

TEST_CASE("first particle left arrow means visited") {
    auto ps = place({{1.0, L}, {2.0, R}, {3.0, B}});
    KeyedCollisionRng rng(1);
    auto t = run(ps, half_line(3), validate_params(0.2, 0.2, 0.2, 0.2), rng);
    auto f = classify_trial(t);
    CHECK(f.first_species == L);
    CHECK(f.visited == Tri::True);
    CHECK(f.r1_fate == RightArrowFate::NotRightArrow);
}

TEST_CASE("classical runs never produce s or p_hat events at p = 0") {
    const auto params = validate_params(0, 0, 0, 0);
    for (std::uint64_t s = 0; s < 200; ++s) {
        InitialConfig cfg{500, Side::RightHalfLine, 0.0, ExponentialSpacing{1.0}, s};
        auto f = classify_trial(run(cfg, params));
        REQUIRE(f.s_event() != Tri::True);
        REQUIRE(f.phat_event() != Tri::True);
    }
}

TEST_CASE("blockade survival counts") {
    const auto params = validate_params(0, 0, 0, 0);
    {
        InitialConfig cfg{300, Side::TwoSided, 1.0, ExponentialSpacing{1.0}, 3};
        auto c = blockade_survival(run(cfg, params), 1.0 / 3);
        CHECK(c.total > 0);
        CHECK(c.surviving == c.total);
    }
    {
        InitialConfig cfg{300, Side::TwoSided, 0.0, ExponentialSpacing{1.0}, 3};
        auto c = blockade_survival(run(cfg, params), 1.0 / 3);
        CHECK(c.total == 0);
        CHECK(c.surviving == 0);
    }
    {
        std::int64_t alive = 0, total = 0;
        for (std::uint64_t s = 0; s < 20; ++s) {
            InitialConfig cfg{4000, Side::TwoSided, 0.3, ExponentialSpacing{1.0}, s};
            auto c = blockade_survival(run(cfg, params), 1.0 / 3);
            alive += c.surviving;
            total += c.total;
        }
        CHECK(total > 0);
        CHECK(alive > 0);
    }
    InitialConfig cfg{10, Side::TwoSided, 0.5, ExponentialSpacing{1.0}, 3};
    CHECK_THROWS(blockade_survival(run(cfg, params), 0.0));
}

TEST_CASE("trace invariants over random runs") {
    CounterStream pick(17);
    for (std::uint64_t s = 0; s < 300; ++s) {
        const double a = 0.9 * pick.next(), b = (1 - a) * pick.next();
        const double al = 0.9 * pick.next(), be = (1 - al) * pick.next();
        const auto params = validate_params(a, b, al, be);
        const Spacing sp = (s % 2) ? Spacing{UniformSpacing{0.2, 1.8}} : Spacing{ExponentialSpacing{1.0}};
        InitialConfig cfg{400, (s % 3) ? Side::RightHalfLine : Side::TwoSided, pick.next(), sp, s};
        auto t = run(cfg, params);
        REQUIRE_NOTHROW(validate_trace(t));
    }
}

TEST_CASE("classical parameters give only mutual events") {
    const auto params = validate_params(0, 0, 0, 0);
    for (std::uint64_t s = 0; s < 100; ++s) {
        InitialConfig cfg{1000, Side::RightHalfLine, 0.3, ExponentialSpacing{1.0}, s};
        auto t = run(cfg, params);
        for (const auto& e : t.events) REQUIRE(e.kind == EventKind::Mutual);
    }
}

TEST_CASE("identical inputs give identical traces") {
    const auto params = validate_params(0.2, 0.3, 0.3, 0.4);
    InitialConfig cfg{3000, Side::RightHalfLine, 0.2, ExponentialSpacing{1.0}, 8};
    auto x = run(cfg, params);
    auto y = run(cfg, params);
    REQUIRE(x.events.size() == y.events.size());
    bool same = true;
    for (std::size_t i = 0; i < x.events.size(); ++i) {
        const auto &e = x.events[i], &f = y.events[i];
        same = same && e.time == f.time && e.position == f.position && e.kind == f.kind && e.left_id == f.left_id &&
               e.right_id == f.right_id && e.created_id == f.created_id;
    }
    CHECK(same);
    CHECK(x.survivors.size() == y.survivors.size());
}

TEST_CASE("successive visit gaps have the first visit distribution") {
    // supercritical, so nearly every trial is shielded and its visit list complete
    const auto params = validate_params(0, 0, 0, 0.5);
    std::vector<double> first, gap;
    for (std::uint64_t s = 0; s < 100000; ++s) {
        InitialConfig cfg{1000, Side::RightHalfLine, 0.25, ExponentialSpacing{1.0}, trial_seed(2024, s)};
        auto t = run(cfg, params);
        if (!certify(t).shielded) continue;
        auto v = origin_visit_times(t);
        if (v.size() >= 1) first.push_back(v[0]);
        if (v.size() >= 2) gap.push_back(v[1] - v[0]);
    }
    MESSAGE("first visits: " << first.size() << ", second visits: " << gap.size());
    REQUIRE(gap.size() > 1000);
    auto ks = ks_two_sample(first, gap);
    CHECK(ks.p_value > 1e-3);
}
