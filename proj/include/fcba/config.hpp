#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fcba/model.hpp"

namespace fcba {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Everything a subcommand may read. Keys of the JSON form match the field
/// names; spacing is {"kind": "exponential", "mean": m} or
/// {"kind": "uniform", "lo": l, "hi": h}; side is "right_half_line" or "two_sided".
struct RunConfig {
    double a = 0.0;
    double b = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    std::optional<double> p;
    std::vector<double> p_grid;
    std::int64_t n = 10000;
    std::vector<std::int64_t> n_schedule;
    std::int64_t trials = 1000;
    std::uint64_t seed = 1;
    Side side = Side::RightHalfLine;
    Spacing spacing = ExponentialSpacing{};
    double tolerance = 1e-12;
    int K = 0;  // 0 = derived from beta
    int i_max = 4;
    double central_fraction = 1.0 / 3.0;
    double epsilon = 0.001;
    double shield_fraction = 0.5;
    int shield_depth = 16;
    unsigned workers = 0;    // not part of the embedded config: results do not depend on it
    std::string output_dir;  // likewise

    ReactionParams params() const { return validate_params(a, b, alpha, beta); }

    /// p_grid if set, otherwise {p} if set, otherwise empty.
    std::vector<double> grid() const;
};

/// Overwrites the fields present in `j`. Throws ConfigError on unknown keys or
/// values of the wrong type.
void apply_json(RunConfig& cfg, const nlohmann::json& j);

/// Everything that determines results (no workers, no output directory).
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace fcba
