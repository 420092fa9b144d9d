#pragma once

#include <cstdint>
#include <string_view>

#include "fcba/model.hpp"
#include "fcba/rng.hpp"

namespace fcba {

enum class ArrowArrowOutcome : std::uint8_t { LeftSurvives, RightSurvives, Coalesce, MutualAnnihilate };
enum class BlockadeArrowOutcome : std::uint8_t { ArrowSurvives, BlockadeSurvives, MutualAnnihilate };

std::string_view to_string(ArrowArrowOutcome o) noexcept;
std::string_view to_string(BlockadeArrowOutcome o) noexcept;

// One uniform draw is partitioned by cumulative probability in the table
// order (left survivor, right survivor, coalesce, mutual).
constexpr ArrowArrowOutcome arrow_arrow_from_uniform(const ReactionParams& r, double u) noexcept {
    const double half = 0.5 * r.a;
    if (u < half) return ArrowArrowOutcome::LeftSurvives;
    if (u < r.a) return ArrowArrowOutcome::RightSurvives;
    if (u < r.a + r.b) return ArrowArrowOutcome::Coalesce;
    return ArrowArrowOutcome::MutualAnnihilate;
}

// Same table for original and generated blockades, and for hits from either side.
constexpr BlockadeArrowOutcome blockade_arrow_from_uniform(const ReactionParams& r, double u) noexcept {
    if (u < r.alpha) return BlockadeArrowOutcome::ArrowSurvives;
    if (u < r.alpha + r.beta) return BlockadeArrowOutcome::BlockadeSurvives;
    return BlockadeArrowOutcome::MutualAnnihilate;
}

template <UniformStream S>
ArrowArrowOutcome resolve_arrow_arrow(const ReactionParams& r, S& stream) {
    return arrow_arrow_from_uniform(r, stream.next());
}

template <UniformStream S>
BlockadeArrowOutcome resolve_blockade_arrow(const ReactionParams& r, S& stream) {
    return blockade_arrow_from_uniform(r, stream.next());
}

}  // namespace fcba
