#include "fcba/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "fcba/rng.hpp"

namespace fcba {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConstraintError("constraint violated: " + what);
}

// Species and spacing draws use distinct sub-keys so they are independent.
constexpr std::uint64_t kSpeciesTag = 0x5350;
constexpr std::uint64_t kSpacingTag = 0x5350 + 1;

Species draw_species(std::uint64_t seed, std::int64_t site, double p) {
    double u = unit_closed_open(mix(seed, static_cast<std::uint64_t>(site), kSpeciesTag));
    if (u < p) return Species::Blockade;
    if (u < p + 0.5 * (1.0 - p)) return Species::LeftArrow;
    return Species::RightArrow;
}

double draw_spacing(std::uint64_t seed, std::int64_t site, const Spacing& law) {
    double u = unit_open(mix(seed, static_cast<std::uint64_t>(site), kSpacingTag));
    if (const auto* e = std::get_if<ExponentialSpacing>(&law)) return -e->mean * std::log(u);
    const auto& un = std::get<UniformSpacing>(law);
    return un.lo + (un.hi - un.lo) * u;
}

}  // namespace

ReactionParams validate_params(double a, double b, double alpha, double beta) {
    require(std::isfinite(a) && std::isfinite(b) && std::isfinite(alpha) && std::isfinite(beta),
            "parameters must be finite");
    require(a >= 0.0 && a < 1.0, "0 <= a < 1");
    require(b >= 0.0 && b < 1.0, "0 <= b < 1");
    require(alpha >= 0.0 && alpha < 1.0, "0 <= alpha < 1");
    require(beta >= 0.0 && beta < 1.0, "0 <= beta < 1");
    require(a + b <= 1.0, "a + b <= 1");
    require(alpha + beta <= 1.0, "alpha + beta <= 1");
    ReactionParams r{a, b, alpha, beta, 1.0 - (a + b), 1.0 - (alpha + beta)};
    // a + b and alpha + beta may round to 1 + ulp; clamp the derived masses.
    if (r.c < 0.0) r.c = 0.0;
    if (r.xi < 0.0) r.xi = 0.0;
    return r;
}

std::string_view to_string(Species s) noexcept {
    switch (s) {
        case Species::LeftArrow: return "left";
        case Species::RightArrow: return "right";
        case Species::Blockade: return "blockade";
        case Species::GeneratedBlockade: return "generated";
    }
    return "?";
}

void validate_config(const InitialConfig& cfg) {
    require(cfg.n >= 1, "n >= 1");
    require(std::isfinite(cfg.p) && cfg.p >= 0.0 && cfg.p <= 1.0, "0 <= p <= 1");
    if (const auto* e = std::get_if<ExponentialSpacing>(&cfg.spacing)) {
        require(std::isfinite(e->mean) && e->mean > 0.0, "exponential spacing mean > 0");
    } else {
        const auto& u = std::get<UniformSpacing>(cfg.spacing);
        require(std::isfinite(u.lo) && std::isfinite(u.hi) && u.lo >= 0.0 && u.hi > u.lo,
                "uniform spacing 0 <= lo < hi");
    }
}

std::vector<SampledParticle> sample_initial_config(const InitialConfig& cfg) {
    validate_config(cfg);
    std::vector<SampledParticle> out;
    out.reserve(static_cast<std::size_t>(cfg.n));

    // Prefix sums can collapse two sites onto one double when a spacing is
    // below half an ulp of the position; nudge to keep strict ordering.
    auto strictly_after = [](double prev, double x) {
        return x > prev ? x : std::nextafter(prev, std::numeric_limits<double>::infinity());
    };

    if (cfg.side == Side::RightHalfLine) {
        double x = 0.0;
        for (std::int64_t k = 1; k <= cfg.n; ++k) {
            x = strictly_after(x, x + draw_spacing(cfg.seed, k, cfg.spacing));
            out.push_back({k, x, draw_species(cfg.seed, k, cfg.p)});
        }
        return out;
    }

    const std::int64_t left = (cfg.n - 1) / 2;
    const std::int64_t right = cfg.n - 1 - left;
    std::vector<double> neg(static_cast<std::size_t>(left));
    double x = 0.0;
    for (std::int64_t k = 1; k <= left; ++k) {
        // spacing x_{-k+1} - x_{-k} is keyed by the site -k
        double next = x - draw_spacing(cfg.seed, -k, cfg.spacing);
        if (!(next < x)) next = std::nextafter(x, -std::numeric_limits<double>::infinity());
        x = next;
        neg[static_cast<std::size_t>(k - 1)] = x;
    }
    for (std::int64_t k = left; k >= 1; --k)
        out.push_back({-k, neg[static_cast<std::size_t>(k - 1)], draw_species(cfg.seed, -k, cfg.p)});
    out.push_back({0, 0.0, draw_species(cfg.seed, 0, cfg.p)});
    x = 0.0;
    for (std::int64_t k = 1; k <= right; ++k) {
        x = strictly_after(x, x + draw_spacing(cfg.seed, k, cfg.spacing));
        out.push_back({k, x, draw_species(cfg.seed, k, cfg.p)});
    }
    return out;
}

}  // namespace fcba
