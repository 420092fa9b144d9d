#include "fcba/estimators.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "fcba/rng.hpp"
#include "fcba/stats.hpp"
#include "fcba/theory.hpp"

namespace fcba {

namespace {

constexpr std::uint64_t kLeftSystemTag = 0x4c454654ULL;
constexpr std::uint64_t kGridTag = 0x67726964ULL;
constexpr double kZ = 1.959963984540054;

// Per-trial value of a quantity: exact when lo == hi, otherwise only bounded.
struct Cell {
    double lo = 0.0;
    double hi = 0.0;
    bool exact() const noexcept { return lo == hi; }
};

Cell cell(Tri t) noexcept {
    switch (t) {
        case Tri::True: return {1.0, 1.0};
        case Tri::False: return {0.0, 0.0};
        case Tri::Unknown: return {0.0, 1.0};
    }
    return {0.0, 1.0};
}

using Column = std::vector<Cell>;

struct Folded {
    double mean = 0.0;  // over the complete trials
    double lo = 0.0;    // over all trials, unknowns at their lower end
    double hi = 0.0;
};

struct Identity {
    std::string name;
    const Column* mc = nullptr;
    std::vector<const Column*> inputs;
    std::function<double(const std::vector<double>&)> closed;
    double truncation = 0.0;
    bool binary = true;
};

Folded fold(const Column& col, const std::vector<char>& complete, std::size_t m) {
    Folded f;
    double sum = 0.0, lo = 0.0, hi = 0.0;
    for (std::size_t t = 0; t < col.size(); ++t) {
        lo += col[t].lo;
        hi += col[t].hi;
        if (complete[t]) sum += col[t].lo;
    }
    const double n = static_cast<double>(col.size());
    f.mean = m ? sum / static_cast<double>(m) : 0.0;
    f.lo = n ? lo / n : 0.0;
    f.hi = n ? hi / n : 1.0;
    return f;
}

IdentityReport evaluate(const Identity& id) {
    IdentityReport rep;
    rep.name = id.name;
    rep.truncation = id.truncation;
    const std::size_t n = id.mc->size();
    std::vector<char> complete(n, 1);
    for (std::size_t t = 0; t < n; ++t) {
        bool ok = (*id.mc)[t].exact();
        for (const Column* c : id.inputs) ok = ok && (*c)[t].exact();
        complete[t] = ok;
    }
    std::size_t m = 0;
    for (char c : complete) m += c ? 1 : 0;

    const Folded x = fold(*id.mc, complete, m);
    std::vector<Folded> ys;
    std::vector<double> ybar;
    for (const Column* c : id.inputs) {
        ys.push_back(fold(*c, complete, m));
        ybar.push_back(ys.back().mean);
    }

    EstimateResult& est = rep.mc_value;
    est.trials = static_cast<std::int64_t>(n);
    est.certified = static_cast<std::int64_t>(m);
    est.certified_fraction = n ? static_cast<double>(m) / static_cast<double>(n) : 0.0;
    est.point = x.mean;
    est.uncertain_low = std::min(x.lo, x.mean);
    est.uncertain_high = std::max(x.hi, x.mean);
    if (m == 0) {
        est.inconclusive = true;
        est.diagnostics = "no trial had every quantity certified; increase n";
        rep.verdict = Verdict::Inconclusive;
        return rep;
    }

    rep.closed_value = id.closed(ybar);
    rep.difference = x.mean - rep.closed_value;

    // delta method: influence of each complete trial on mc - closed
    std::vector<double> grad(ybar.size(), 0.0);
    for (std::size_t k = 0; k < ybar.size(); ++k) {
        const double h = 1e-6;
        auto up = ybar, dn = ybar;
        up[k] += h;
        dn[k] -= h;
        grad[k] = (id.closed(up) - id.closed(dn)) / (2 * h);
    }
    double ss = 0.0, xs = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        if (!complete[t]) continue;
        double phi = (*id.mc)[t].lo - x.mean;
        xs += phi * phi;
        for (std::size_t k = 0; k < ybar.size(); ++k) phi -= grad[k] * ((*id.inputs[k])[t].lo - ybar[k]);
        ss += phi * phi;
    }
    const double md = static_cast<double>(m);
    rep.se = m > 1 ? std::sqrt(ss / (md - 1) / md) : 0.0;
    const double se_x = m > 1 ? std::sqrt(xs / (md - 1) / md) : 0.0;
    rep.z_score = rep.se > 0 ? rep.difference / rep.se : (rep.difference == 0 ? 0.0 : INFINITY);

    if (id.binary) {
        std::int64_t k = 0;
        for (std::size_t t = 0; t < n; ++t)
            if (complete[t] && (*id.mc)[t].lo == 1.0) ++k;
        est.successes = k;
        const Interval ci = wilson_interval(k, static_cast<std::int64_t>(m));
        est.ci_low = ci.low;
        est.ci_high = ci.high;
    } else {
        est.ci_low = x.mean - kZ * se_x;
        est.ci_high = x.mean + kZ * se_x;
    }

    // corners of the folded inputs give the band
    double band = 0.0;
    const std::size_t corners = std::size_t{1} << (ybar.size() + 1);
    for (std::size_t mask = 0; mask < corners; ++mask) {
        const double xv = (mask & 1) ? x.hi : x.lo;
        std::vector<double> yv(ybar.size());
        for (std::size_t k = 0; k < ybar.size(); ++k) yv[k] = (mask >> (k + 1) & 1) ? ys[k].hi : ys[k].lo;
        band = std::max(band, std::abs(xv - id.closed(yv) - rep.difference));
    }
    rep.band = band;
    rep.verdict = decide(rep.difference, rep.se, rep.truncation, rep.band);
    return rep;
}

InitialConfig half_line(double p, std::uint64_t seed, const RunOptions& opt) {
    InitialConfig cfg;
    cfg.n = opt.n;
    cfg.side = Side::RightHalfLine;
    cfg.p = p;
    cfg.spacing = opt.spacing;
    cfg.seed = seed;
    validate_config(cfg);
    return cfg;
}

// Weighted sums over the visit sequences of two independent half-line
// systems: `right` visits the origin from the right (tau <-), `left` stands
// for visits from the left (tau ->) by reflection.
struct SideVisits {
    const std::vector<double>* times;
    bool complete;  // no further visits (shielded)
};

template <typename Indicator>
Cell beta_double_sum(double beta, int K, SideVisits left, SideVisits right, Indicator ind) {
    Cell out;
    const auto nl = static_cast<int>(left.times->size());
    const auto nr = static_cast<int>(right.times->size());
    for (int i = 1; i <= K; ++i) {
        for (int j = 1; j <= K; ++j) {
            const double w = std::pow(beta, i + j);
            const bool unknown = (i > nl && !left.complete) || (j > nr && !right.complete);
            if (unknown) {
                out.hi += w;
                continue;
            }
            if (i > nl || j > nr) continue;  // one of the times is infinite
            if (ind(i, j)) {
                out.lo += w;
                out.hi += w;
            }
        }
    }
    return out;
}

struct Trial {
    std::vector<Cell> at_least;  // index k-1 holds "at least k visits"
    Cell rec2, s, r, phat;
    std::array<Cell, 3> arrow;     // left survives, coalesce, mutual
    std::array<Cell, 3> blockade;  // strong, weak, mutual first hit
    Cell S, triple;
};

Trial run_suite_trial(const ReactionParams& P, double p, std::uint64_t seed, int K, int i_max, bool sums,
                      const RunOptions& opt) {
    Trial out;
    const Trace a = run(half_line(p, seed, opt), P);
    const TrialFlags f = classify_trial(a, opt.policy);
    for (int k = 1; k <= i_max; ++k) out.at_least.push_back(cell(f.at_least_visits(static_cast<std::size_t>(k))));
    out.rec2 = cell(f.rec2_event());
    out.s = cell(f.s_event());
    out.r = cell(f.r_event());
    out.phat = cell(f.phat_event());
    out.arrow = {cell(f.r1_is(RightArrowFate::KilledByLeftSurvivor)), cell(f.r1_is(RightArrowFate::Coalesced)),
                 cell(f.r1_is(RightArrowFate::MutualWithArrow))};
    out.blockade = {cell(f.b1_hit_is(BlockadeFirstHit::Strong)), cell(f.b1_hit_is(BlockadeFirstHit::Weak)),
                    cell(f.b1_hit_is(BlockadeFirstHit::Mutual))};
    if (sums) {
        const Trace b = run(half_line(p, mix(seed, kLeftSystemTag), opt), P);
        const auto tb = origin_visit_times(b);
        const SideVisits left{&tb, certify(b, opt.policy).shielded};
        const SideVisits right{&f.visit_times, f.cert.shielded};
        const auto& ta = f.visit_times;
        out.S = beta_double_sum(P.beta, K, left, right, [&](int i, int j) { return tb[i - 1] < ta[j - 1]; });
        out.triple = beta_double_sum(P.beta, K, left, right, [&](int i, int j) {
            const double prev = j >= 2 ? ta[j - 2] : 0.0;
            return prev < tb[i - 1] && tb[i - 1] < ta[j - 1];
        });
    }
    return out;
}

std::vector<Trial> suite_trials(const ReactionParams& P, double p, int K, int i_max, bool sums,
                                const RunOptions& opt) {
    if (opt.trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (opt.n < 10) throw std::invalid_argument("n must be at least 10");
    return run_trials<Trial>(opt.trials, opt.workers, [&](std::int64_t t) {
        return run_suite_trial(P, p, trial_seed(opt.seed, static_cast<std::uint64_t>(t)), K, i_max, sums, opt);
    });
}

template <typename Get>
Column column(const std::vector<Trial>& trials, Get get) {
    Column c;
    c.reserve(trials.size());
    for (const Trial& t : trials) c.push_back(get(t));
    return c;
}

EstimateResult proportion_of(const Column& c) {
    std::int64_t yes = 0, no = 0, unk = 0;
    for (const Cell& x : c) {
        if (!x.exact()) ++unk;
        else if (x.lo == 1.0) ++yes;
        else ++no;
    }
    return proportion_estimate(yes, no, unk);
}

struct Columns {
    std::vector<Column> at_least;
    Column rec2, s, r, phat, S, triple;
    std::array<Column, 3> arrow, blockade;
    Column blockade_hit;
};

Columns columns_of(const std::vector<Trial>& trials) {
    Columns c;
    const std::size_t imax = trials.empty() ? 0 : trials.front().at_least.size();
    for (std::size_t k = 0; k < imax; ++k)
        c.at_least.push_back(column(trials, [k](const Trial& t) { return t.at_least[k]; }));
    c.rec2 = column(trials, [](const Trial& t) { return t.rec2; });
    c.s = column(trials, [](const Trial& t) { return t.s; });
    c.r = column(trials, [](const Trial& t) { return t.r; });
    c.phat = column(trials, [](const Trial& t) { return t.phat; });
    c.S = column(trials, [](const Trial& t) { return t.S; });
    c.triple = column(trials, [](const Trial& t) { return t.triple; });
    for (std::size_t k = 0; k < 3; ++k) {
        c.arrow[k] = column(trials, [k](const Trial& t) { return t.arrow[k]; });
        c.blockade[k] = column(trials, [k](const Trial& t) { return t.blockade[k]; });
    }
    c.blockade_hit = column(trials, [](const Trial& t) {
        Cell h;
        for (const Cell& x : t.blockade) {
            h.lo += x.lo;
            h.hi = std::min(1.0, h.hi + x.hi);
        }
        return h;
    });
    return c;
}

IdentityReport rec2_report(const ReactionParams& P, double p, const Columns& c) {
    return evaluate({"rec2", &c.rec2, {&c.at_least.at(0)},
                     [&](const std::vector<double>& y) { return rec2_closed(P, p, y[0]); }});
}

std::vector<IdentityReport> s_r_phat_reports(const ReactionParams& P, double p, const Columns& c) {
    std::vector<IdentityReport> out;
    const Column& q = c.at_least.at(0);
    out.push_back(evaluate({"s", &c.s, {&q, &c.phat},
                            [&](const std::vector<double>& y) { return s_closed(P, p, y[1], y[0]); }}));
    out.push_back(evaluate({"r", &c.r, {&q, &c.phat},
                            [&](const std::vector<double>& y) { return r_closed(P, p, y[1], y[0]); }}));
    if (P.c > 0.0) {
        out.push_back(evaluate({"p_hat", &c.phat, {&c.arrow[2]},
                                [&](const std::vector<double>& y) { return hatp_from_mutual(P, y[0]); }}));
    }
    return out;
}

void ratio_reports(std::vector<IdentityReport>& out, const std::string& prefix, const std::array<Column, 3>& cols,
                   const std::array<double, 3>& w, const std::array<const char*, 3>& names) {
    for (std::size_t i = 0; i < 3; ++i) {
        if (w[i] == 0.0) {
            out.push_back(evaluate({prefix + names[i] + " frequency vs 0", &cols[i], {},
                                    [](const std::vector<double>&) { return 0.0; }}));
            continue;
        }
        for (std::size_t j = i + 1; j < 3; ++j) {
            if (w[j] == 0.0) continue;
            // mc: freq_i / w_i, closed: freq_j / w_j
            Column scaled = cols[i];
            for (Cell& x : scaled) {
                x.lo /= w[i];
                x.hi /= w[i];
            }
            const double wj = w[j];
            out.push_back(evaluate({prefix + names[i] + "/" + names[j], &scaled, {&cols[j]},
                                    [wj](const std::vector<double>& y) { return y[0] / wj; }, 0.0, false}));
        }
    }
}

std::vector<IdentityReport> change_of_measure_reports(const ReactionParams& P, double p, const Columns& c) {
    std::vector<IdentityReport> out;
    ratio_reports(out, "cm_arrow ", c.arrow, {P.a / 2, P.b, P.c}, {"left_survives", "coalesce", "mutual"});
    ratio_reports(out, "cm_blockade ", c.blockade, {P.alpha, P.beta, P.xi}, {"strong", "weak", "mutual"});
    out.push_back(evaluate({"cm_blockade first_hit vs p q", &c.blockade_hit, {&c.at_least.at(0)},
                            [p](const std::vector<double>& y) { return p * y[0]; }}));
    return out;
}

IdentityReport S_report(const ReactionParams& P, int K, const Columns& c) {
    return evaluate({"S", &c.S, {&c.at_least.at(0)},
                     [&](const std::vector<double>& y) { return S_closed(P.beta, y[0]); },
                     P.beta > 0 ? truncation_tail(P.beta, K) : 0.0, false});
}

IdentityReport triple_report(const ReactionParams& P, int K, const Columns& c) {
    return evaluate({"triple_sum", &c.triple, {&c.at_least.at(0)},
                     [&](const std::vector<double>& y) { return triple_sum_closed(P.beta, y[0]); },
                     P.beta > 0 ? truncation_tail(P.beta, K) : 0.0, false});
}

std::vector<IdentityReport> visit_power_reports(const Columns& c) {
    std::vector<IdentityReport> out;
    for (std::size_t i = 1; i <= c.at_least.size(); ++i) {
        out.push_back(evaluate({"visits>=" + std::to_string(i), &c.at_least[i - 1], {&c.at_least[0]},
                                [i](const std::vector<double>& y) { return std::pow(y[0], static_cast<double>(i)); }}));
    }
    return out;
}

int resolve_K(const ReactionParams& P, int K) {
    if (K > 0) return K;
    return truncation_index(P.beta);
}

}  // namespace

unsigned resolve_workers(unsigned requested) noexcept {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

std::string_view to_string(PhaseClass c) noexcept {
    switch (c) {
        case PhaseClass::Subcritical: return "subcritical";
        case PhaseClass::Supercritical: return "supercritical";
        case PhaseClass::Undetermined: return "undetermined";
    }
    return "?";
}

Verdict decide(double difference, double se, double truncation, double band) {
    const double d = std::abs(difference);
    const double tol = 3 * se + truncation;
    if (d <= tol) return Verdict::Pass;
    if (d <= tol + band) return Verdict::Inconclusive;
    return Verdict::Fail;
}

EstimateResult proportion_estimate(std::int64_t yes, std::int64_t no, std::int64_t unknown) {
    EstimateResult e;
    e.trials = yes + no + unknown;
    e.certified = yes + no;
    e.successes = yes;
    if (e.trials == 0) throw std::invalid_argument("proportion_estimate: no trials");
    const double n = static_cast<double>(e.trials);
    e.certified_fraction = static_cast<double>(e.certified) / n;
    e.uncertain_low = static_cast<double>(yes) / n;
    e.uncertain_high = static_cast<double>(yes + unknown) / n;
    if (e.certified == 0) {
        e.inconclusive = true;
        e.point = 0.5 * (e.uncertain_low + e.uncertain_high);
        e.ci_low = 0.0;
        e.ci_high = 1.0;
        e.diagnostics = "all trials uncertain; increase n";
        return e;
    }
    e.point = static_cast<double>(yes) / static_cast<double>(e.certified);
    const Interval ci = wilson_interval(yes, e.certified);
    e.ci_low = ci.low;
    e.ci_high = ci.high;
    return e;
}

EstimateResult estimate_q(const ReactionParams& P, double p, const RunOptions& opt) {
    const auto trials = suite_trials(P, p, 1, 1, false, opt);
    return proportion_of(column(trials, [](const Trial& t) { return t.at_least[0]; }));
}

IdentityReport estimate_rec2(const ReactionParams& P, double p, const RunOptions& opt) {
    return rec2_report(P, p, columns_of(suite_trials(P, p, 1, 1, false, opt)));
}

std::vector<IdentityReport> estimate_s_r_phat(const ReactionParams& P, double p, const RunOptions& opt) {
    return s_r_phat_reports(P, p, columns_of(suite_trials(P, p, 1, 1, false, opt)));
}

std::vector<IdentityReport> estimate_change_of_measure(const ReactionParams& P, double p, const RunOptions& opt) {
    return change_of_measure_reports(P, p, columns_of(suite_trials(P, p, 1, 1, false, opt)));
}

IdentityReport estimate_S(const ReactionParams& P, double p, int K, const RunOptions& opt) {
    K = resolve_K(P, K);
    return S_report(P, K, columns_of(suite_trials(P, p, K, 1, true, opt)));
}

IdentityReport estimate_triple_sum(const ReactionParams& P, double p, int K, const RunOptions& opt) {
    K = resolve_K(P, K);
    return triple_report(P, K, columns_of(suite_trials(P, p, K, 1, true, opt)));
}

std::vector<IdentityReport> estimate_visit_powers(const ReactionParams& P, double p, int i_max,
                                                  const RunOptions& opt) {
    if (i_max < 1) throw std::invalid_argument("i_max must be at least 1");
    return visit_power_reports(columns_of(suite_trials(P, p, 1, i_max, false, opt)));
}

SuiteResult identity_suite(const ReactionParams& P, double p, int K, int i_max, const RunOptions& opt) {
    if (i_max < 1) throw std::invalid_argument("i_max must be at least 1");
    K = resolve_K(P, K);
    const auto trials = suite_trials(P, p, K, i_max, true, opt);
    const Columns c = columns_of(trials);
    SuiteResult out;
    out.q = proportion_of(c.at_least[0]);
    out.p_hat = proportion_of(c.phat);
    out.reports.push_back(rec2_report(P, p, c));
    for (auto& r : s_r_phat_reports(P, p, c)) out.reports.push_back(std::move(r));
    for (auto& r : change_of_measure_reports(P, p, c)) out.reports.push_back(std::move(r));
    out.reports.push_back(S_report(P, K, c));
    out.reports.push_back(triple_report(P, K, c));
    for (auto& r : visit_power_reports(c)) out.reports.push_back(std::move(r));
    return out;
}

SurvivalPoint survival_point(const ReactionParams& P, double p, std::int64_t n, const PcOptions& opt) {
    if (opt.trials < 2) throw std::invalid_argument("survival_point: need at least 2 trials");
    const std::uint64_t base = mix(opt.seed, std::bit_cast<std::uint64_t>(p), kGridTag);
    const auto counts = run_trials<SurvivalCount>(opt.trials, opt.workers, [&](std::int64_t t) {
        InitialConfig cfg;
        cfg.n = n;
        cfg.side = Side::TwoSided;
        cfg.p = p;
        cfg.spacing = opt.spacing;
        cfg.seed = trial_seed(base, static_cast<std::uint64_t>(t));
        return blockade_survival(run(cfg, P), opt.central_fraction);
    });
    SurvivalPoint sp;
    sp.p = p;
    sp.n = n;
    for (const auto& c : counts) {
        sp.surviving += c.surviving;
        sp.total += c.total;
    }
    if (sp.total == 0) {
        sp.ci_high = 1.0;
        return sp;
    }
    sp.fraction = static_cast<double>(sp.surviving) / static_cast<double>(sp.total);
    double ss = 0.0;
    for (const auto& c : counts) {
        const double e = static_cast<double>(c.surviving) - sp.fraction * static_cast<double>(c.total);
        ss += e * e;
    }
    const double m = static_cast<double>(counts.size());
    sp.se = std::sqrt(ss * m / (m - 1)) / static_cast<double>(sp.total);
    sp.ci_low = std::max(0.0, sp.fraction - kZ * sp.se);
    sp.ci_high = std::min(1.0, sp.fraction + kZ * sp.se);
    return sp;
}

PcBracket bracket_from_classes(const std::vector<double>& grid, std::vector<PhaseClass> classes) {
    if (grid.empty()) throw std::invalid_argument("empirical_pc: empty grid");
    if (grid.size() != classes.size()) throw std::invalid_argument("empirical_pc: one class per grid point");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw std::invalid_argument("empirical_pc: grid must be increasing");
    PcBracket out;
    out.classes = std::move(classes);
    const auto& cl = out.classes;
    const std::size_t n = grid.size();

    std::size_t first_super = n;
    for (std::size_t i = 0; i < n; ++i)
        if (cl[i] == PhaseClass::Supercritical) {
            first_super = i;
            break;
        }
    std::size_t last_sub = n;
    for (std::size_t i = n; i-- > 0;)
        if (cl[i] == PhaseClass::Subcritical) {
            last_sub = i;
            break;
        }

    if (first_super < n && last_sub < n && last_sub > first_super) {
        std::ostringstream os;
        os << "non-monotone classification: subcritical at p=" << grid[last_sub] << " above supercritical p="
           << grid[first_super] << "; bracket widened";
        out.warnings.push_back(os.str());
        std::size_t lo = first_super;
        while (lo > 0 && cl[lo - 1] != PhaseClass::Subcritical) --lo;
        out.p_lower = lo > 0 ? grid[lo - 1] : grid.front();
        std::size_t hi = last_sub;
        while (hi + 1 < n && cl[hi + 1] != PhaseClass::Supercritical) ++hi;
        out.p_upper = hi + 1 < n ? grid[hi + 1] : grid.back();
        if (lo == 0) out.warnings.push_back("no subcritical point below the bracket; p_lower is the grid minimum");
        if (hi + 1 >= n) out.warnings.push_back("no supercritical point above the bracket; p_upper is the grid maximum");
        return out;
    }
    if (first_super == n) {
        out.p_upper = grid.back();
        out.warnings.push_back("no supercritical grid point; p_upper is the grid maximum");
    } else {
        out.p_upper = grid[first_super];
    }
    std::size_t lo = first_super == n ? n : first_super;
    std::size_t below = n;
    for (std::size_t i = lo; i-- > 0;)
        if (cl[i] == PhaseClass::Subcritical) {
            below = i;
            break;
        }
    if (below == n) {
        out.p_lower = grid.front();
        out.warnings.push_back("no subcritical grid point below the bracket; p_lower is the grid minimum");
    } else {
        out.p_lower = grid[below];
    }
    return out;
}

PcBracket empirical_pc(const ReactionParams& P, const std::vector<double>& grid, const PcOptions& opt) {
    if (grid.empty()) throw std::invalid_argument("empirical_pc: empty grid");
    if (opt.n_schedule.empty()) throw std::invalid_argument("empirical_pc: empty n schedule");
    std::vector<SurvivalPoint> points;
    std::vector<PhaseClass> classes;
    for (double p : grid) {
        bool above = true;
        SurvivalPoint last;
        for (std::int64_t n : opt.n_schedule) {
            last = survival_point(P, p, n, opt);
            points.push_back(last);
            above = above && last.ci_low > opt.epsilon;
        }
        if (above) classes.push_back(PhaseClass::Supercritical);
        else if (last.fraction < opt.epsilon) classes.push_back(PhaseClass::Subcritical);
        else classes.push_back(PhaseClass::Undetermined);
    }
    PcBracket out = bracket_from_classes(grid, std::move(classes));
    out.points = std::move(points);
    return out;
}

IdentityReport mtp_crosscheck(const ReactionParams& P, double p, const RunOptions& opt) {
    struct Pair {
        Cell victims, killers;
    };
    const auto rows = run_trials<Pair>(opt.trials, opt.workers, [&](std::int64_t t) {
        InitialConfig cfg;
        cfg.n = opt.n;
        cfg.side = Side::TwoSided;
        cfg.p = p;
        cfg.spacing = opt.spacing;
        cfg.seed = trial_seed(opt.seed, static_cast<std::uint64_t>(t));
        const Trace tr = run(cfg, P);
        const double mid = 0.5 * (tr.window_left + tr.window_right);
        const double half = (tr.window_right - tr.window_left) / 6;
        const double len = 2 * half;
        double victims = 0.0, killers = 0.0;
        for (const Particle& q : tr.particles) {
            if (std::abs(q.birth_position - mid) > half) continue;
            if (is_blockade(q.species)) killers += q.weak_hits_left;
            if (q.species == Species::RightArrow && !q.alive &&
                tr.events[static_cast<std::size_t>(q.terminal_event)].kind == EventKind::WeakFromLeft)
                victims += 1.0;
        }
        return Pair{{victims / len, victims / len}, {killers / len, killers / len}};
    });
    Column v, k;
    for (const auto& r : rows) {
        v.push_back(r.victims);
        k.push_back(r.killers);
    }
    return evaluate({"mtp weak kills per victim vs per killer", &v, {&k},
                     [](const std::vector<double>& y) { return y[0]; }, 0.0, false});
}

}  // namespace fcba
