#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "fcba/engine.hpp"
#include "fcba/model.hpp"

namespace fcba {

struct EstimateResult {
    double point = 0.0;
    double ci_low = 0.0;  // 95% Wilson, over certified trials
    double ci_high = 1.0;
    std::int64_t trials = 0;
    std::int64_t certified = 0;
    std::int64_t successes = 0;  // among certified trials
    double certified_fraction = 0.0;
    double uncertain_low = 0.0;   // every uncertain trial counted as failure
    double uncertain_high = 1.0;  // every uncertain trial counted as success
    bool inconclusive = false;    // no certified trial at all
    std::string diagnostics;
};

/// Proportion estimate from three-valued per-trial outcomes.
EstimateResult proportion_estimate(std::int64_t yes, std::int64_t no, std::int64_t unknown);

enum class Verdict : std::uint8_t { Pass, Fail, Inconclusive };
std::string_view to_string(Verdict v) noexcept;

struct IdentityReport {
    std::string name;
    EstimateResult mc_value;
    double closed_value = 0.0;
    double difference = 0.0;  // mc - closed
    double se = 0.0;          // of the difference, delta method over trials
    double z_score = 0.0;
    double truncation = 0.0;  // deterministic bound on the truncated tail
    double band = 0.0;        // largest shift of the difference over uncertain trials
    Verdict verdict = Verdict::Inconclusive;
};

/// Pass if |difference| <= 3 se + truncation; Inconclusive if it only passes
/// after adding the uncertainty band; Fail otherwise.
Verdict decide(double difference, double se, double truncation, double band);

struct RunOptions {
    std::int64_t n = 10000;
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    Spacing spacing = ExponentialSpacing{};
    CertificationPolicy policy;
    unsigned workers = 0;  // 0 = available parallelism
};

unsigned resolve_workers(unsigned requested) noexcept;

/// Runs fn(trial) for every trial on a pool of workers and returns the
/// results in trial order, so reductions never depend on scheduling.
template <typename R>
std::vector<R> run_trials(std::int64_t trials, unsigned workers, const std::function<R(std::int64_t)>& fn) {
    std::vector<R> out(static_cast<std::size_t>(std::max<std::int64_t>(trials, 0)));
    const unsigned w = std::min<unsigned>(resolve_workers(workers), static_cast<unsigned>(std::max<std::int64_t>(trials, 1)));
    std::atomic<std::int64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (std::int64_t t; (t = next.fetch_add(1)) < trials;) {
            try {
                out[static_cast<std::size_t>(t)] = fn(t);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = trials;
            }
        }
    };
    if (w <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < w; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return out;
}

EstimateResult estimate_q(const ReactionParams& params, double p, const RunOptions& opt);

IdentityReport estimate_rec2(const ReactionParams& params, double p, const RunOptions& opt);

/// s, r and p_hat. The p_hat report compares the coalescence frequency with
/// hatp_from_mutual and is omitted when c = 0.
std::vector<IdentityReport> estimate_s_r_phat(const ReactionParams& params, double p, const RunOptions& opt);

/// Pairwise ratio checks for the fate of the first right arrow (a/2, b, c)
/// and for the first hit of the first blockade (alpha, beta, xi), plus the
/// total first-hit frequency against p q.
std::vector<IdentityReport> estimate_change_of_measure(const ReactionParams& params, double p,
                                                       const RunOptions& opt);

/// K = 0 selects truncation_index(beta).
IdentityReport estimate_S(const ReactionParams& params, double p, int K, const RunOptions& opt);
IdentityReport estimate_triple_sum(const ReactionParams& params, double p, int K, const RunOptions& opt);

std::vector<IdentityReport> estimate_visit_powers(const ReactionParams& params, double p, int i_max,
                                                  const RunOptions& opt);

/// Everything above from one pass over the trials.
struct SuiteResult {
    EstimateResult q;
    EstimateResult p_hat;
    std::vector<IdentityReport> reports;
};
SuiteResult identity_suite(const ReactionParams& params, double p, int K, int i_max, const RunOptions& opt);

struct SurvivalPoint {
    double p = 0.0;
    std::int64_t n = 0;
    std::int64_t surviving = 0;
    std::int64_t total = 0;
    double fraction = 0.0;
    double se = 0.0;  // ratio estimator, trials as clusters
    double ci_low = 0.0;
    double ci_high = 0.0;
};

enum class PhaseClass : std::uint8_t { Subcritical, Supercritical, Undetermined };
std::string_view to_string(PhaseClass c) noexcept;

struct PcBracket {
    double p_lower = 0.0;
    double p_upper = 1.0;
    std::vector<SurvivalPoint> points;
    std::vector<PhaseClass> classes;  // one per grid value
    std::vector<std::string> warnings;

    bool contains(double x) const noexcept { return p_lower <= x && x <= p_upper; }
};

struct PcOptions {
    std::vector<std::int64_t> n_schedule{10000, 20000, 40000};
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    double central_fraction = 1.0 / 3.0;
    double epsilon = 0.001;
    Spacing spacing = ExponentialSpacing{};
    unsigned workers = 0;
};

SurvivalPoint survival_point(const ReactionParams& params, double p, std::int64_t n, const PcOptions& opt);

/// A grid point is supercritical when the lower 95% bound of the central
/// blockade survival fraction exceeds epsilon at every n, subcritical when
/// the fraction is below epsilon at the largest n, and undetermined otherwise.
/// The bracket runs from the largest subcritical point below the smallest
/// supercritical point to that supercritical point.
PcBracket empirical_pc(const ReactionParams& params, const std::vector<double>& p_grid, const PcOptions& opt);

/// Classification step of empirical_pc, exposed for testing.
PcBracket bracket_from_classes(const std::vector<double>& p_grid, std::vector<PhaseClass> classes);

/// Mass transport cross-check: weak kills of right arrows by blockades,
/// counted once per killer and once per victim over the central window.
IdentityReport mtp_crosscheck(const ReactionParams& params, double p, const RunOptions& opt);

}  // namespace fcba
