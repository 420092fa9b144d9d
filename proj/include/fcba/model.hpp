#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fcba {

class ConstraintError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Reaction probabilities of the four-parameter coalescing system.
///
/// Arrow-arrow collisions leave the left arrow (a/2), the right arrow (a/2),
/// a generated blockade (b) or nothing (c). Arrow-blockade collisions leave
/// the arrow (alpha, strong), the blockade (beta, weak) or nothing (xi).
struct ReactionParams {
    double a = 0.0;
    double b = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double c = 1.0;
    double xi = 1.0;

    friend bool operator==(const ReactionParams&, const ReactionParams&) = default;
};

/// Checks 0 <= a,b,alpha,beta < 1, a+b <= 1, alpha+beta <= 1 and fills c, xi.
/// Throws ConstraintError naming the violated inequality.
ReactionParams validate_params(double a, double b, double alpha, double beta);

enum class Species : std::uint8_t { LeftArrow, RightArrow, Blockade, GeneratedBlockade };

constexpr bool is_blockade(Species s) noexcept {
    return s == Species::Blockade || s == Species::GeneratedBlockade;
}

constexpr double velocity(Species s) noexcept {
    switch (s) {
        case Species::LeftArrow: return -1.0;
        case Species::RightArrow: return 1.0;
        default: return 0.0;
    }
}

std::string_view to_string(Species s) noexcept;

enum class Side : std::uint8_t { RightHalfLine, TwoSided };

struct ExponentialSpacing {
    double mean = 1.0;
};

struct UniformSpacing {
    double lo = 0.0;
    double hi = 1.0;
};

using Spacing = std::variant<ExponentialSpacing, UniformSpacing>;

struct InitialConfig {
    std::int64_t n = 0;
    Side side = Side::RightHalfLine;
    double p = 0.0;
    Spacing spacing = ExponentialSpacing{};
    std::uint64_t seed = 0;
};

/// Throws ConstraintError on n < 1, p outside [0,1] or a spacing law without
/// positive continuous support.
void validate_config(const InitialConfig& cfg);

/// A particle of the initial configuration. `site` is the signed index k of
/// the position x_k (k >= 1 for the half line, x_0 = 0 on the two-sided line).
struct SampledParticle {
    std::int64_t site = 0;
    double position = 0.0;
    Species species = Species::Blockade;
};

/// Positions are strictly increasing. Particle k depends only on (seed, k) and
/// the spacings between 0 and k, so a window of 2n particles extends the
/// window of n particles with the same seed.
std::vector<SampledParticle> sample_initial_config(const InitialConfig& cfg);

/// Key used to derive collision randomness for an original particle.
constexpr std::uint64_t site_key(std::int64_t site) noexcept {
    return static_cast<std::uint64_t>(site) * 2 + 1;
}

struct Particle {
    std::int64_t id = 0;
    Species species = Species::Blockade;
    double birth_position = 0.0;
    double birth_time = 0.0;
    bool alive = true;
    std::uint32_t weak_hits_right = 0;
    std::uint32_t weak_hits_left = 0;

    std::uint64_t key = 0;
    std::int64_t site = 0;          // generated blockades inherit the left parent's site
    double death_time = 0.0;        // valid when !alive
    std::int64_t terminal_event = -1;

    double position_at(double t) const noexcept {
        return birth_position + velocity(species) * (t - birth_time);
    }
};

}  // namespace fcba
