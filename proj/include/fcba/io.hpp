#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fcba/engine.hpp"
#include "fcba/estimators.hpp"
#include "fcba/theory.hpp"

namespace fcba {

inline constexpr std::string_view kVersion = "fcba 1.0.0";

nlohmann::json to_json(const ReactionParams& p);
nlohmann::json to_json(const InitialConfig& c);
nlohmann::json to_json(const EstimateResult& e);
nlohmann::json to_json(const IdentityReport& r);
nlohmann::json to_json(const QSolution& s);
nlohmann::json to_json(const SurvivalPoint& s);
nlohmann::json to_json(const PcBracket& b);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

/// One row per event. The leading '#' lines carry the version and `config`.
void write_events_csv(std::ostream& os, const Trace& trace, const nlohmann::json& config);

// Colours and strokes of the space-time diagram, after the usual convention:
// blockades blue, arrows red, space horizontal, time upwards.
struct SvgStyle {
    std::string_view blockade_colour = "#1f4e9e";
    std::string_view generated_colour = "#5d8fd6";
    std::string_view arrow_colour = "#c0262d";
    std::string_view background = "#ffffff";
    std::string_view axis_colour = "#444444";
    double arrow_stroke = 0.9;
    double blockade_stroke = 1.4;
    double width = 900.0;
    double height = 600.0;
    double margin = 30.0;
};

/// Particle trajectories of a trace. Survivors are drawn to 1.1 times the
/// time of the last event (at least up to the window width when there is
/// no event). `config` is embedded as a comment.
void write_svg(std::ostream& os, const Trace& trace, const nlohmann::json& config, const SvgStyle& style = {});

}  // namespace fcba
