#pragma once

#include <concepts>
#include <cstdint>

namespace fcba {

// Counter-based randomness. Every random quantity in the simulator is a pure
// function of (seed, key...), so a particle's species and spacing do not depend
// on how many particles are sampled, and a collision outcome does not depend on
// the order in which the engine happens to process events.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
    return splitmix64(a ^ splitmix64(b ^ 0x2545f4914f6cdd1dULL));
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
    return mix(mix(a, b), c);
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double unit_closed_open(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1); never 0, never 1.
constexpr double unit_open(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

/// Per-trial seed as a stable hash of (master seed, trial index).
constexpr std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) noexcept {
    return mix(master_seed, trial, 0x747269616cULL);
}

/// Sequential stream over a fixed key. One call to next() is one draw.
class CounterStream {
public:
    constexpr explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

    constexpr double next() noexcept { return unit_closed_open(mix(key_, counter_++)); }
    constexpr std::uint64_t draws() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

template <typename S>
concept UniformStream = requires(S s) {
    { s.next() } -> std::convertible_to<double>;
};

}  // namespace fcba
