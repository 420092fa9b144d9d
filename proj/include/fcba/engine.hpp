#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fcba/model.hpp"

namespace fcba {

enum class EventKind : std::uint8_t {
    Mutual,               // both participants die
    StrongLeftSurvives,   // the left-moving arrow survives, its partner dies
    StrongRightSurvives,  // the right-moving arrow survives, its partner dies
    WeakFromRight,        // a blockade survives a left arrow arriving from the right
    WeakFromLeft,         // a blockade survives a right arrow arriving from the left
    CoalesceToBlockade,   // two arrows die and leave a generated blockade
};

std::string_view to_string(EventKind k) noexcept;

struct Event {
    double time = 0.0;
    double position = 0.0;
    EventKind kind = EventKind::Mutual;
    std::int64_t left_id = -1;
    std::int64_t right_id = -1;
    std::optional<std::int64_t> created_id;
};

struct CrossedLeftOfOrigin {
    double time = 0.0;
};
struct StillAlive {
    double position = 0.0;  // at the time of the last event
};

struct Survivor {
    std::int64_t id = 0;
    std::variant<CrossedLeftOfOrigin, StillAlive> exit;
};

/// Source of the single uniform that decides a collision. The draw is keyed by
/// the two participants so outcomes are independent of processing order.
class CollisionRng {
public:
    virtual ~CollisionRng() = default;
    virtual double uniform(std::uint64_t left_key, std::uint64_t right_key) = 0;
};

class KeyedCollisionRng final : public CollisionRng {
public:
    explicit KeyedCollisionRng(std::uint64_t seed) : seed_(seed) {}
    double uniform(std::uint64_t left_key, std::uint64_t right_key) override;
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
};

/// Replays a fixed list of uniforms in event order (for rigged tests).
class ScriptedCollisionRng final : public CollisionRng {
public:
    explicit ScriptedCollisionRng(std::vector<double> draws) : draws_(std::move(draws)) {}
    double uniform(std::uint64_t, std::uint64_t) override;

private:
    std::vector<double> draws_;
    std::size_t at_ = 0;
};

/// Seed of the collision randomness used by run(cfg, params).
std::uint64_t reaction_seed(const InitialConfig& cfg) noexcept;

struct Trace {
    InitialConfig config;
    ReactionParams params;
    std::optional<std::uint64_t> reaction_seed;  // set when a keyed rng was used
    std::vector<Particle> particles;             // originals in spatial order, then generated
    std::vector<Event> events;                   // non-decreasing time
    std::vector<Survivor> survivors;
    std::size_t original_count = 0;
    double window_left = 0.0;   // leftmost initial position
    double window_right = 0.0;  // rightmost initial position (x_n for the half line)
    double end_time = 0.0;
};

/// Resolves every collision of a finite configuration in time order.
Trace run(std::span<const SampledParticle> particles, const InitialConfig& cfg,
          const ReactionParams& params, CollisionRng& rng);

/// Samples cfg and runs it with the keyed collision rng.
Trace run(const InitialConfig& cfg, const ReactionParams& params);

// ---------------------------------------------------------------------------
// Truncation control for half-line trials.
//
// Particles beyond x_n can only influence space-time points with y + t > x_n.
// Every left arrow of the window lives on y + t = const <= x_n, so all of the
// window's origin crossings, and any event at y + t <= x_n, are exact.
// What a finite window cannot see is a left arrow born outside it. A blockade
// that is never destroyed separates everything to its left from the outside.
// A trial is shielded when at least `shield_depth` blockades survive the
// finite run at positions <= shield_fraction * x_n; they are assumed to hold,
// which makes the trial exact left of `shield_position`. This part is a
// heuristic, checked empirically by extending the window.

struct CertificationPolicy {
    double shield_fraction = 0.5;
    int shield_depth = 16;
};

struct Certification {
    double cone = 0.0;  // x_n
    std::size_t shield_blockades = 0;
    bool shielded = false;
    // Position of the shield_depth-th surviving blockade counted leftwards from
    // shield_fraction * x_n; meaningful only when shielded.
    double shield_position = 0.0;
};

Certification certify(const Trace& trace, const CertificationPolicy& policy = {});

enum class Tri : std::uint8_t { False, True, Unknown };

constexpr Tri tri(bool b) noexcept { return b ? Tri::True : Tri::False; }
constexpr Tri tri_and(Tri x, Tri y) noexcept {
    if (x == Tri::False || y == Tri::False) return Tri::False;
    if (x == Tri::True && y == Tri::True) return Tri::True;
    return Tri::Unknown;
}
constexpr Tri tri_not(Tri x) noexcept {
    return x == Tri::Unknown ? x : (x == Tri::True ? Tri::False : Tri::True);
}

struct OriginOutcome {
    enum class Kind : std::uint8_t { VisitedCertified, NotVisitedCertified, Uncertain };
    Kind kind = Kind::Uncertain;
    std::optional<double> first_visit_time;
};

std::string_view to_string(OriginOutcome::Kind k) noexcept;

/// Throws std::logic_error for a two-sided trace.
OriginOutcome origin_outcome(const Trace& trace, const CertificationPolicy& policy = {});

/// Times at which left arrows of a half-line trace cross the origin, increasing.
std::vector<double> origin_visit_times(const Trace& trace);

enum class VisitSide : std::uint8_t { FromRight, FromLeft };

struct VisitSequence {
    double location = 0.0;
    std::vector<double> from_right_times;
    std::vector<double> from_left_times;
};

/// Re-simulates only the particles on the requested side of u and returns the
/// times at which u is visited from that side.
VisitSequence visit_sequence(const Trace& trace, double u, VisitSide side, CollisionRng& rng);
VisitSequence visit_sequence(const Trace& trace, double u, VisitSide side);

// ---------------------------------------------------------------------------
// Per-trial classification of a half-line trace.

enum class RightArrowFate : std::uint8_t {
    NotRightArrow,
    KilledByLeftSurvivor,  // the left arrow it met survived
    Coalesced,
    MutualWithArrow,
    WeakIntoBlockade,        // destroyed by an original blockade that survived
    MutualWithBlockade,      // mutual annihilation with an original blockade
    WeakIntoGenerated,
    MutualWithGenerated,
    Unknown,
};

enum class BlockadeFirstHit : std::uint8_t { NotBlockade, Strong, Weak, Mutual, NeverHit, Unknown };

std::string_view to_string(RightArrowFate f) noexcept;
std::string_view to_string(BlockadeFirstHit h) noexcept;

struct TrialFlags {
    Species first_species = Species::Blockade;
    Certification cert;
    Tri visited = Tri::Unknown;           // the origin is visited by a left arrow
    std::vector<double> visit_times;      // exact prefix of the infinite system's visits
    RightArrowFate r1_fate = RightArrowFate::Unknown;
    BlockadeFirstHit b1_first_hit = BlockadeFirstHit::Unknown;

    /// At least k visits (k >= 1).
    Tri at_least_visits(std::size_t k) const noexcept;
    Tri r1_killed_by_blockade() const noexcept;           // weak or mutual, either blockade type
    Tri r1_killed_by_original_blockade() const noexcept;
    Tri r1_killed_by_generated_blockade() const noexcept;
    Tri r1_is(RightArrowFate f) const noexcept;
    Tri b1_hit_is(BlockadeFirstHit h) const noexcept;
    Tri s_event() const noexcept { return tri_and(visited, r1_killed_by_blockade()); }
    Tri r_event() const noexcept { return tri_and(tri_not(visited), r1_killed_by_blockade()); }
    Tri phat_event() const noexcept { return r1_is(RightArrowFate::Coalesced); }
    Tri rec2_event() const noexcept { return tri_and(visited, tri(is_blockade(first_species))); }
};

TrialFlags classify_trial(const Trace& trace, const CertificationPolicy& policy = {});

struct SurvivalCount {
    std::int64_t surviving = 0;
    std::int64_t total = 0;
};

/// Original blockades initially inside the central fraction of the window and
/// how many of them are alive at the end.
SurvivalCount blockade_survival(const Trace& trace, double central_fraction);

/// Consistency checks on a trace; throws std::logic_error describing the first
/// violation. Used by tests and by `simulate --check`.
void validate_trace(const Trace& trace);

}  // namespace fcba
