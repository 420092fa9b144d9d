#include "fcba/config.hpp"

namespace fcba {

using nlohmann::json;

std::vector<double> RunConfig::grid() const {
    if (!p_grid.empty()) return p_grid;
    if (p) return {*p};
    return {};
}

namespace {

Spacing spacing_from(const json& j) {
    if (!j.is_object()) throw ConfigError("spacing must be an object");
    const std::string kind = j.value("kind", "exponential");
    for (const auto& [k, v] : j.items()) {
        (void)v;
        if (k != "kind" && k != "mean" && k != "lo" && k != "hi") throw ConfigError("unknown spacing key: " + k);
    }
    if (kind == "exponential") {
        if (j.contains("lo") || j.contains("hi")) throw ConfigError("exponential spacing takes only mean");
        return ExponentialSpacing{j.value("mean", 1.0)};
    }
    if (kind == "uniform") {
        if (j.contains("mean")) throw ConfigError("uniform spacing takes lo and hi");
        return UniformSpacing{j.value("lo", 0.0), j.value("hi", 1.0)};
    }
    throw ConfigError("unknown spacing kind: " + kind);
}

json spacing_json(const Spacing& s) {
    if (const auto* e = std::get_if<ExponentialSpacing>(&s)) return {{"kind", "exponential"}, {"mean", e->mean}};
    const auto& u = std::get<UniformSpacing>(s);
    return {{"kind", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
}

template <typename T>
T get(const json& j, const std::string& key) {
    try {
        return j.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("wrong type for key: " + key);
    }
}

}  // namespace

void apply_json(RunConfig& c, const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (k == "a") c.a = get<double>(v, k);
        else if (k == "b") c.b = get<double>(v, k);
        else if (k == "alpha") c.alpha = get<double>(v, k);
        else if (k == "beta") c.beta = get<double>(v, k);
        else if (k == "p") c.p = get<double>(v, k);
        else if (k == "p_grid") c.p_grid = get<std::vector<double>>(v, k);
        else if (k == "n") c.n = get<std::int64_t>(v, k);
        else if (k == "n_schedule") c.n_schedule = get<std::vector<std::int64_t>>(v, k);
        else if (k == "trials") c.trials = get<std::int64_t>(v, k);
        else if (k == "seed") c.seed = get<std::uint64_t>(v, k);
        else if (k == "side") {
            const auto s = get<std::string>(v, k);
            if (s == "right_half_line") c.side = Side::RightHalfLine;
            else if (s == "two_sided") c.side = Side::TwoSided;
            else throw ConfigError("side must be right_half_line or two_sided");
        } else if (k == "spacing") c.spacing = spacing_from(v);
        else if (k == "tolerance") c.tolerance = get<double>(v, k);
        else if (k == "K") c.K = get<int>(v, k);
        else if (k == "i_max") c.i_max = get<int>(v, k);
        else if (k == "central_fraction") c.central_fraction = get<double>(v, k);
        else if (k == "epsilon") c.epsilon = get<double>(v, k);
        else if (k == "shield_fraction") c.shield_fraction = get<double>(v, k);
        else if (k == "shield_depth") c.shield_depth = get<int>(v, k);
        else if (k == "workers") c.workers = get<unsigned>(v, k);
        else if (k == "output_dir") c.output_dir = get<std::string>(v, k);
        else throw ConfigError("unknown config key: " + k);
    }
}

json to_json(const RunConfig& c) {
    json j = {{"a", c.a},
              {"b", c.b},
              {"alpha", c.alpha},
              {"beta", c.beta},
              {"n", c.n},
              {"trials", c.trials},
              {"seed", c.seed},
              {"side", c.side == Side::RightHalfLine ? "right_half_line" : "two_sided"},
              {"spacing", spacing_json(c.spacing)},
              {"tolerance", c.tolerance},
              {"K", c.K},
              {"i_max", c.i_max},
              {"central_fraction", c.central_fraction},
              {"epsilon", c.epsilon},
              {"shield_fraction", c.shield_fraction},
              {"shield_depth", c.shield_depth}};
    if (c.p) j["p"] = *c.p;
    if (!c.p_grid.empty()) j["p_grid"] = c.p_grid;
    if (!c.n_schedule.empty()) j["n_schedule"] = c.n_schedule;
    return j;
}

}  // namespace fcba
