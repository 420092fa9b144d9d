#include "fcba/engine.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "fcba/reaction.hpp"
#include "fcba/rng.hpp"

namespace fcba {

namespace {

constexpr std::int64_t kNone = -1;
constexpr std::uint64_t kReactionTag = 0x7265616374ULL;
constexpr std::uint64_t kGeneratedTag = 0x67656eULL;

struct Candidate {
    double time;
    double position;
    std::int64_t left;
    std::int64_t right;
};

// Min-heap order: earliest time, then leftmost position, then lower id.
struct Later {
    bool operator()(const Candidate& x, const Candidate& y) const noexcept {
        if (x.time != y.time) return x.time > y.time;
        if (x.position != y.position) return x.position > y.position;
        return x.left > y.left;
    }
};

// Right arrows keep y - t constant, left arrows keep y + t constant.
double right_intercept(const Particle& p) noexcept { return p.birth_position - p.birth_time; }
double left_intercept(const Particle& p) noexcept { return p.birth_position + p.birth_time; }

struct OneDraw {
    double u;
    double next() const noexcept { return u; }
};

class Engine {
public:
    Engine(std::span<const SampledParticle> init, const ReactionParams& params, CollisionRng& rng)
        : params_(params), rng_(rng) {
        const auto n = init.size();
        particles_.reserve(n + n / 4 + 1);
        prev_.reserve(particles_.capacity());
        next_.reserve(particles_.capacity());
        heap_.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            Particle p;
            p.id = static_cast<std::int64_t>(i);
            p.species = init[i].species;
            p.birth_position = init[i].position;
            p.key = site_key(init[i].site);
            p.site = init[i].site;
            particles_.push_back(p);
            prev_.push_back(kNone);
            next_.push_back(kNone);
        }
        if (n > 0) {
            span_ = std::max(1.0, init.back().position - init.front().position);
        }
        for (std::size_t i = 0; i + 1 < n; ++i)
            link(static_cast<std::int64_t>(i), static_cast<std::int64_t>(i + 1));
    }

    void run() {
        const double tol = 1e-9 * span_;
        while (!heap_.empty()) {
            std::pop_heap(heap_.begin(), heap_.end(), Later{});
            const Candidate c = heap_.back();
            heap_.pop_back();
            // lazy deletion: a candidate is live only while both ends are
            // alive and still adjacent
            if (!particles_[c.left].alive || !particles_[c.right].alive || next_[c.left] != c.right)
                continue;
            now_ = c.time;
            const double yl = particles_[c.left].position_at(now_);
            const double yr = particles_[c.right].position_at(now_);
            if (!(std::abs(yl - yr) <= tol)) {
                std::ostringstream os;
                os << "engine: participants " << c.left << "," << c.right << " apart by " << (yl - yr)
                   << " at t=" << now_;
                throw std::logic_error(os.str());
            }
            resolve(c.left, c.right, c.position);
        }
    }

    std::vector<Particle> take_particles() { return std::move(particles_); }
    std::vector<Event> take_events() { return std::move(events_); }
    double end_time() const noexcept { return now_; }

    std::int64_t head() const noexcept {
        for (std::size_t i = 0; i < particles_.size(); ++i)
            if (particles_[i].alive && prev_[i] == kNone) return static_cast<std::int64_t>(i);
        return kNone;
    }
    std::int64_t next_of(std::int64_t i) const noexcept { return next_[i]; }

private:
    void link(std::int64_t l, std::int64_t r) {
        if (l != kNone) next_[l] = r;
        if (r != kNone) prev_[r] = l;
        if (l != kNone && r != kNone) consider(l, r);
    }

    void consider(std::int64_t l, std::int64_t r) {
        const Particle& pl = particles_[l];
        const Particle& pr = particles_[r];
        double t = 0.0;
        double y = 0.0;
        if (pl.species == Species::RightArrow && pr.species == Species::LeftArrow) {
            const double c = right_intercept(pl);
            const double d = left_intercept(pr);
            t = 0.5 * (d - c);
            y = 0.5 * (d + c);
        } else if (pl.species == Species::RightArrow && is_blockade(pr.species)) {
            y = pr.birth_position;
            t = y - right_intercept(pl);
        } else if (is_blockade(pl.species) && pr.species == Species::LeftArrow) {
            y = pl.birth_position;
            t = left_intercept(pr) - y;
        } else {
            return;
        }
        if (t < now_) t = now_;  // rounding only; an adjacent approaching pair meets in the future
        heap_.push_back({t, y, l, r});
        std::push_heap(heap_.begin(), heap_.end(), Later{});
    }

    void kill(std::int64_t i, std::int64_t event_index) {
        Particle& p = particles_[i];
        p.alive = false;
        p.death_time = now_;
        p.terminal_event = event_index;
    }

    std::int64_t create_blockade(std::int64_t l, std::int64_t r, double y) {
        Particle g;
        g.id = static_cast<std::int64_t>(particles_.size());
        g.species = Species::GeneratedBlockade;
        g.birth_position = y;
        g.birth_time = now_;
        g.key = mix(particles_[l].key, particles_[r].key, kGeneratedTag);
        g.site = particles_[l].site;
        particles_.push_back(g);
        prev_.push_back(kNone);
        next_.push_back(kNone);
        return g.id;
    }

    void resolve(std::int64_t l, std::int64_t r, double y) {
        const Species sl = particles_[l].species;
        const Species sr = particles_[r].species;
        const OneDraw draw{rng_.uniform(particles_[l].key, particles_[r].key)};
        const std::int64_t before = prev_[l];
        const std::int64_t after = next_[r];
        const auto idx = static_cast<std::int64_t>(events_.size());
        Event ev{now_, y, EventKind::Mutual, l, r, std::nullopt};

        if (sl == Species::RightArrow && sr == Species::LeftArrow) {
            switch (arrow_arrow_from_uniform(params_, draw.next())) {
                case ArrowArrowOutcome::LeftSurvives:
                    ev.kind = EventKind::StrongLeftSurvives;
                    kill(l, idx);
                    link(before, r);
                    break;
                case ArrowArrowOutcome::RightSurvives:
                    ev.kind = EventKind::StrongRightSurvives;
                    kill(r, idx);
                    link(l, after);
                    break;
                case ArrowArrowOutcome::Coalesce: {
                    ev.kind = EventKind::CoalesceToBlockade;
                    kill(l, idx);
                    kill(r, idx);
                    const std::int64_t g = create_blockade(l, r, y);
                    ev.created_id = g;
                    link(before, g);
                    link(g, after);
                    break;
                }
                case ArrowArrowOutcome::MutualAnnihilate:
                    kill(l, idx);
                    kill(r, idx);
                    link(before, after);
                    break;
            }
        } else if (sl == Species::RightArrow) {
            switch (blockade_arrow_from_uniform(params_, draw.next())) {
                case BlockadeArrowOutcome::ArrowSurvives:
                    ev.kind = EventKind::StrongRightSurvives;
                    kill(r, idx);
                    link(l, after);
                    break;
                case BlockadeArrowOutcome::BlockadeSurvives:
                    ev.kind = EventKind::WeakFromLeft;
                    ++particles_[r].weak_hits_left;
                    kill(l, idx);
                    link(before, r);
                    break;
                case BlockadeArrowOutcome::MutualAnnihilate:
                    kill(l, idx);
                    kill(r, idx);
                    link(before, after);
                    break;
            }
        } else {
            switch (blockade_arrow_from_uniform(params_, draw.next())) {
                case BlockadeArrowOutcome::ArrowSurvives:
                    ev.kind = EventKind::StrongLeftSurvives;
                    kill(l, idx);
                    link(before, r);
                    break;
                case BlockadeArrowOutcome::BlockadeSurvives:
                    ev.kind = EventKind::WeakFromRight;
                    ++particles_[l].weak_hits_right;
                    kill(r, idx);
                    link(l, after);
                    break;
                case BlockadeArrowOutcome::MutualAnnihilate:
                    kill(l, idx);
                    kill(r, idx);
                    link(before, after);
                    break;
            }
        }
        events_.push_back(ev);
    }

    ReactionParams params_;
    CollisionRng& rng_;
    std::vector<Particle> particles_;
    std::vector<std::int64_t> prev_;
    std::vector<std::int64_t> next_;
    std::vector<Candidate> heap_;
    std::vector<Event> events_;
    double now_ = 0.0;
    double span_ = 1.0;
};

bool is_arrow(Species s) { return s == Species::LeftArrow || s == Species::RightArrow; }

}  // namespace

std::string_view to_string(EventKind k) noexcept {
    switch (k) {
        case EventKind::Mutual: return "mutual";
        case EventKind::StrongLeftSurvives: return "strong_left_survives";
        case EventKind::StrongRightSurvives: return "strong_right_survives";
        case EventKind::WeakFromRight: return "weak_from_right";
        case EventKind::WeakFromLeft: return "weak_from_left";
        case EventKind::CoalesceToBlockade: return "coalesce";
    }
    return "?";
}

std::string_view to_string(OriginOutcome::Kind k) noexcept {
    switch (k) {
        case OriginOutcome::Kind::VisitedCertified: return "visited";
        case OriginOutcome::Kind::NotVisitedCertified: return "not_visited";
        case OriginOutcome::Kind::Uncertain: return "uncertain";
    }
    return "?";
}

std::string_view to_string(RightArrowFate f) noexcept {
    switch (f) {
        case RightArrowFate::NotRightArrow: return "not_right_arrow";
        case RightArrowFate::KilledByLeftSurvivor: return "killed_by_left_survivor";
        case RightArrowFate::Coalesced: return "coalesced";
        case RightArrowFate::MutualWithArrow: return "mutual_with_arrow";
        case RightArrowFate::WeakIntoBlockade: return "weak_into_blockade";
        case RightArrowFate::MutualWithBlockade: return "mutual_with_blockade";
        case RightArrowFate::WeakIntoGenerated: return "weak_into_generated";
        case RightArrowFate::MutualWithGenerated: return "mutual_with_generated";
        case RightArrowFate::Unknown: return "unknown";
    }
    return "?";
}

std::string_view to_string(BlockadeFirstHit h) noexcept {
    switch (h) {
        case BlockadeFirstHit::NotBlockade: return "not_blockade";
        case BlockadeFirstHit::Strong: return "strong";
        case BlockadeFirstHit::Weak: return "weak";
        case BlockadeFirstHit::Mutual: return "mutual";
        case BlockadeFirstHit::NeverHit: return "never_hit";
        case BlockadeFirstHit::Unknown: return "unknown";
    }
    return "?";
}

double KeyedCollisionRng::uniform(std::uint64_t left_key, std::uint64_t right_key) {
    CounterStream s(mix(seed_, left_key, right_key));
    return s.next();
}

double ScriptedCollisionRng::uniform(std::uint64_t, std::uint64_t) {
    if (at_ >= draws_.size()) throw std::out_of_range("scripted collision rng exhausted");
    return draws_[at_++];
}

std::uint64_t reaction_seed(const InitialConfig& cfg) noexcept { return mix(cfg.seed, kReactionTag); }

Trace run(std::span<const SampledParticle> init, const InitialConfig& cfg, const ReactionParams& params,
          CollisionRng& rng) {
    Trace trace;
    trace.config = cfg;
    trace.params = params;
    if (auto* keyed = dynamic_cast<KeyedCollisionRng*>(&rng)) trace.reaction_seed = keyed->seed();
    trace.original_count = init.size();
    if (!init.empty()) {
        trace.window_left = init.front().position;
        trace.window_right = init.back().position;
    }

    Engine engine(init, params, rng);
    engine.run();
    trace.end_time = engine.end_time();

    std::vector<std::int64_t> order;
    for (std::int64_t i = engine.head(); i != kNone; i = engine.next_of(i)) order.push_back(i);

    trace.particles = engine.take_particles();
    trace.events = engine.take_events();
    for (std::int64_t i : order) {
        const Particle& p = trace.particles[i];
        if (cfg.side == Side::RightHalfLine && p.species == Species::LeftArrow) {
            trace.survivors.push_back({p.id, CrossedLeftOfOrigin{left_intercept(p)}});
        } else {
            trace.survivors.push_back({p.id, StillAlive{p.position_at(trace.end_time)}});
        }
    }
    return trace;
}

Trace run(const InitialConfig& cfg, const ReactionParams& params) {
    const auto init = sample_initial_config(cfg);
    KeyedCollisionRng rng(reaction_seed(cfg));
    return run(init, cfg, params, rng);
}

Certification certify(const Trace& trace, const CertificationPolicy& policy) {
    Certification c;
    c.cone = trace.window_right;
    const double limit = policy.shield_fraction * trace.window_right;
    std::vector<double> shield;
    for (const Particle& p : trace.particles)
        if (p.alive && is_blockade(p.species) && p.birth_position <= limit) shield.push_back(p.birth_position);
    c.shield_blockades = shield.size();
    const auto depth = static_cast<std::size_t>(std::max(1, policy.shield_depth));
    c.shielded = shield.size() >= depth;
    if (c.shielded) {
        std::sort(shield.begin(), shield.end(), std::greater<>());
        c.shield_position = shield[depth - 1];
    }
    return c;
}

std::vector<double> origin_visit_times(const Trace& trace) {
    std::vector<double> times;
    for (const Survivor& s : trace.survivors)
        if (const auto* x = std::get_if<CrossedLeftOfOrigin>(&s.exit)) times.push_back(x->time);
    std::sort(times.begin(), times.end());
    return times;
}

OriginOutcome origin_outcome(const Trace& trace, const CertificationPolicy& policy) {
    if (trace.config.side != Side::RightHalfLine)
        throw std::logic_error("origin_outcome requires a half-line trace");
    const auto times = origin_visit_times(trace);
    if (!times.empty()) return {OriginOutcome::Kind::VisitedCertified, times.front()};
    if (certify(trace, policy).shielded) return {OriginOutcome::Kind::NotVisitedCertified, std::nullopt};
    return {OriginOutcome::Kind::Uncertain, std::nullopt};
}

VisitSequence visit_sequence(const Trace& trace, double u, VisitSide side, CollisionRng& rng) {
    std::vector<SampledParticle> subset;
    for (std::size_t i = 0; i < trace.original_count; ++i) {
        const Particle& p = trace.particles[i];
        const bool keep = side == VisitSide::FromRight ? p.birth_position > u : p.birth_position < u;
        if (keep) subset.push_back({p.site, p.birth_position, p.species});
    }
    VisitSequence out;
    out.location = u;
    if (subset.empty()) return out;
    InitialConfig cfg = trace.config;
    cfg.n = static_cast<std::int64_t>(subset.size());
    const Trace restricted = run(subset, cfg, trace.params, rng);
    for (const Particle& p : restricted.particles) {
        if (!p.alive) continue;
        if (side == VisitSide::FromRight && p.species == Species::LeftArrow)
            out.from_right_times.push_back(left_intercept(p) - u);
        if (side == VisitSide::FromLeft && p.species == Species::RightArrow)
            out.from_left_times.push_back(u - right_intercept(p));
    }
    std::sort(out.from_right_times.begin(), out.from_right_times.end());
    std::sort(out.from_left_times.begin(), out.from_left_times.end());
    return out;
}

VisitSequence visit_sequence(const Trace& trace, double u, VisitSide side) {
    if (!trace.reaction_seed) throw std::logic_error("visit_sequence: trace was not produced by a keyed rng");
    KeyedCollisionRng rng(*trace.reaction_seed);
    return visit_sequence(trace, u, side, rng);
}

Tri TrialFlags::at_least_visits(std::size_t k) const noexcept {
    if (visit_times.size() >= k) return Tri::True;
    return cert.shielded ? Tri::False : Tri::Unknown;
}

Tri TrialFlags::r1_is(RightArrowFate f) const noexcept {
    if (r1_fate == RightArrowFate::Unknown) return Tri::Unknown;
    return tri(r1_fate == f);
}

Tri TrialFlags::r1_killed_by_original_blockade() const noexcept {
    if (r1_fate == RightArrowFate::Unknown) return Tri::Unknown;
    return tri(r1_fate == RightArrowFate::WeakIntoBlockade || r1_fate == RightArrowFate::MutualWithBlockade);
}

Tri TrialFlags::r1_killed_by_generated_blockade() const noexcept {
    if (r1_fate == RightArrowFate::Unknown) return Tri::Unknown;
    return tri(r1_fate == RightArrowFate::WeakIntoGenerated || r1_fate == RightArrowFate::MutualWithGenerated);
}

Tri TrialFlags::r1_killed_by_blockade() const noexcept {
    if (r1_fate == RightArrowFate::Unknown) return Tri::Unknown;
    return tri(r1_killed_by_original_blockade() == Tri::True || r1_killed_by_generated_blockade() == Tri::True);
}

Tri TrialFlags::b1_hit_is(BlockadeFirstHit h) const noexcept {
    if (b1_first_hit == BlockadeFirstHit::Unknown) return Tri::Unknown;
    return tri(b1_first_hit == h);
}

TrialFlags classify_trial(const Trace& trace, const CertificationPolicy& policy) {
    if (trace.config.side != Side::RightHalfLine)
        throw std::logic_error("classify_trial requires a half-line trace");
    TrialFlags f;
    f.cert = certify(trace, policy);
    f.visit_times = origin_visit_times(trace);
    f.visited = !f.visit_times.empty() ? Tri::True : (f.cert.shielded ? Tri::False : Tri::Unknown);
    if (trace.original_count == 0) return f;

    const Particle& first = trace.particles[0];
    f.first_species = first.species;
    auto known = [&](const Event& e) {
        return e.position + e.time <= f.cert.cone || (f.cert.shielded && e.position <= f.cert.shield_position);
    };

    if (first.species != Species::RightArrow) {
        f.r1_fate = RightArrowFate::NotRightArrow;
    } else if (first.alive) {
        f.r1_fate = RightArrowFate::Unknown;
    } else {
        const Event& e = trace.events[static_cast<std::size_t>(first.terminal_event)];
        const Species partner = trace.particles[static_cast<std::size_t>(e.right_id)].species;
        if (!known(e)) {
            f.r1_fate = RightArrowFate::Unknown;
        } else if (partner == Species::LeftArrow) {
            f.r1_fate = e.kind == EventKind::StrongLeftSurvives  ? RightArrowFate::KilledByLeftSurvivor
                        : e.kind == EventKind::CoalesceToBlockade ? RightArrowFate::Coalesced
                                                                  : RightArrowFate::MutualWithArrow;
        } else {
            const bool weak = e.kind == EventKind::WeakFromLeft;
            if (partner == Species::Blockade)
                f.r1_fate = weak ? RightArrowFate::WeakIntoBlockade : RightArrowFate::MutualWithBlockade;
            else
                f.r1_fate = weak ? RightArrowFate::WeakIntoGenerated : RightArrowFate::MutualWithGenerated;
        }
    }

    if (first.species != Species::Blockade) {
        f.b1_first_hit = BlockadeFirstHit::NotBlockade;
    } else {
        // b_1 is leftmost, so it is always the left participant
        f.b1_first_hit = f.cert.shielded ? BlockadeFirstHit::NeverHit : BlockadeFirstHit::Unknown;
        for (const Event& e : trace.events) {
            if (e.left_id != 0) continue;
            f.b1_first_hit = e.kind == EventKind::WeakFromRight       ? BlockadeFirstHit::Weak
                             : e.kind == EventKind::StrongLeftSurvives ? BlockadeFirstHit::Strong
                                                                       : BlockadeFirstHit::Mutual;
            break;
        }
    }
    return f;
}

SurvivalCount blockade_survival(const Trace& trace, double central_fraction) {
    if (!(central_fraction > 0.0 && central_fraction <= 1.0))
        throw std::invalid_argument("central_fraction must be in (0, 1]");
    SurvivalCount out;
    const double mid = 0.5 * (trace.window_left + trace.window_right);
    const double half = 0.5 * central_fraction * (trace.window_right - trace.window_left);
    for (std::size_t i = 0; i < trace.original_count; ++i) {
        const Particle& p = trace.particles[i];
        if (p.species != Species::Blockade) continue;
        if (std::abs(p.birth_position - mid) > half) continue;
        ++out.total;
        if (p.alive) ++out.surviving;
    }
    return out;
}

void validate_trace(const Trace& trace) {
    auto fail = [](const std::string& what) { throw std::logic_error("trace invariant: " + what); };
    const double tol = 1e-9 * std::max(1.0, trace.window_right - trace.window_left);
    double last = 0.0;
    std::vector<int> terminal_refs(trace.particles.size(), 0);
    for (std::size_t k = 0; k < trace.events.size(); ++k) {
        const Event& e = trace.events[k];
        if (e.time < last) fail("event times decrease at event " + std::to_string(k));
        last = e.time;
        const Particle& l = trace.particles.at(static_cast<std::size_t>(e.left_id));
        const Particle& r = trace.particles.at(static_cast<std::size_t>(e.right_id));
        if (l.species == r.species && is_arrow(l.species)) fail("same-direction arrows collided");
        if (is_blockade(l.species) && is_blockade(r.species)) fail("two blockades collided");
        if (l.species == Species::LeftArrow || r.species == Species::RightArrow)
            fail("receding pair collided at event " + std::to_string(k));
        for (const Particle* p : {&l, &r}) {
            if (e.time < p->birth_time - tol) fail("participant referenced before birth");
            if (!p->alive && e.time > p->death_time + tol) fail("participant referenced after death");
            if (std::abs(p->position_at(e.time) - e.position) > tol) fail("participants not at the event position");
        }
        for (const Particle* p : {&l, &r})
            if (p->terminal_event == static_cast<std::int64_t>(k)) ++terminal_refs[static_cast<std::size_t>(p->id)];
        if (e.created_id) {
            const Particle& g = trace.particles.at(static_cast<std::size_t>(*e.created_id));
            if (g.species != Species::GeneratedBlockade || g.birth_time != e.time) fail("bad created blockade");
        }
    }
    std::size_t alive = 0;
    for (const Particle& p : trace.particles) {
        if (!is_blockade(p.species) && (p.weak_hits_left || p.weak_hits_right)) fail("arrow with weak hits");
        if (p.alive) {
            ++alive;
            if (p.terminal_event != -1) fail("alive particle with a terminal event");
        } else if (terminal_refs[static_cast<std::size_t>(p.id)] != 1) {
            fail("dead particle " + std::to_string(p.id) + " without exactly one terminal event");
        }
    }
    if (alive != trace.survivors.size()) fail("survivor list does not match alive particles");
}

}  // namespace fcba
