#include "fcba/reaction.hpp"

namespace fcba {

std::string_view to_string(ArrowArrowOutcome o) noexcept {
    switch (o) {
        case ArrowArrowOutcome::LeftSurvives: return "left_survives";
        case ArrowArrowOutcome::RightSurvives: return "right_survives";
        case ArrowArrowOutcome::Coalesce: return "coalesce";
        case ArrowArrowOutcome::MutualAnnihilate: return "mutual";
    }
    return "?";
}

std::string_view to_string(BlockadeArrowOutcome o) noexcept {
    switch (o) {
        case BlockadeArrowOutcome::ArrowSurvives: return "arrow_survives";
        case BlockadeArrowOutcome::BlockadeSurvives: return "blockade_survives";
        case BlockadeArrowOutcome::MutualAnnihilate: return "mutual";
    }
    return "?";
}

}  // namespace fcba
