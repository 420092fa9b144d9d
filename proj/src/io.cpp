#include "fcba/io.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace fcba {

using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

json to_json(const ReactionParams& p) {
    return {{"a", p.a}, {"b", p.b}, {"alpha", p.alpha}, {"beta", p.beta}, {"c", p.c}, {"xi", p.xi}};
}

json to_json(const InitialConfig& c) {
    json spacing;
    if (const auto* e = std::get_if<ExponentialSpacing>(&c.spacing)) {
        spacing = {{"kind", "exponential"}, {"mean", e->mean}};
    } else {
        const auto& u = std::get<UniformSpacing>(c.spacing);
        spacing = {{"kind", "uniform"}, {"lo", u.lo}, {"hi", u.hi}};
    }
    return {{"n", c.n},
            {"side", c.side == Side::RightHalfLine ? "right_half_line" : "two_sided"},
            {"p", c.p},
            {"spacing", spacing},
            {"seed", c.seed}};
}

json to_json(const EstimateResult& e) {
    json j = {{"point", e.point},
              {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},
              {"trials", e.trials},
              {"certified", e.certified},
              {"successes", e.successes},
              {"certified_fraction", e.certified_fraction},
              {"uncertain_low", e.uncertain_low},
              {"uncertain_high", e.uncertain_high},
              {"inconclusive", e.inconclusive}};
    if (!e.diagnostics.empty()) j["diagnostics"] = e.diagnostics;
    return j;
}

json to_json(const IdentityReport& r) {
    return {{"name", r.name},
            {"mc_value", to_json(r.mc_value)},
            {"closed_value", r.closed_value},
            {"difference", r.difference},
            {"se", r.se},
            {"z_score", r.z_score},
            {"truncation", r.truncation},
            {"band", r.band},
            {"verdict", to_string(r.verdict)}};
}

json to_json(const QSolution& s) {
    return {{"p", s.p}, {"q", s.q}, {"branch", to_string(s.branch)}, {"residual", s.residual}};
}

json to_json(const SurvivalPoint& s) {
    return {{"p", s.p},         {"n", s.n},   {"surviving", s.surviving}, {"total", s.total},
            {"fraction", s.fraction}, {"se", s.se}, {"ci_low", s.ci_low},     {"ci_high", s.ci_high}};
}

json to_json(const PcBracket& b) {
    json pts = json::array();
    for (const auto& p : b.points) pts.push_back(to_json(p));
    json classes = json::array();
    for (auto c : b.classes) classes.push_back(to_string(c));
    return {{"p_lower", b.p_lower}, {"p_upper", b.p_upper}, {"classes", classes}, {"points", pts},
            {"warnings", b.warnings}};
}

void write_events_csv(std::ostream& os, const Trace& trace, const json& config) {
    os << "# " << kVersion << '\n';
    os << "# config: " << config.dump() << '\n';
    os << "index,time,position,kind,left_id,right_id,created_id\n";
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
        const Event& e = trace.events[i];
        os << i << ',' << format_double(e.time) << ',' << format_double(e.position) << ',' << to_string(e.kind) << ','
           << e.left_id << ',' << e.right_id << ',';
        if (e.created_id) os << *e.created_id;
        os << '\n';
    }
}

void write_svg(std::ostream& os, const Trace& trace, const json& config, const SvgStyle& st) {
    const double x0 = std::min(0.0, trace.window_left);
    const double x1 = std::max(trace.window_right, x0 + 1.0);
    double tmax = trace.end_time > 0 ? 1.1 * trace.end_time : (x1 - x0);
    if (tmax <= 0) tmax = 1.0;
    const double pw = st.width - 2 * st.margin;
    const double ph = st.height - 2 * st.margin;
    auto sx = [&](double x) { return st.margin + (x - x0) / (x1 - x0) * pw; };
    auto sy = [&](double t) { return st.height - st.margin - t / tmax * ph; };

    std::string cfg = config.dump();
    // "--" may not appear inside an XML comment
    for (std::size_t k; (k = cfg.find("--")) != std::string::npos;) cfg.replace(k, 2, "- -");

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << st.width << "\" height=\"" << st.height
       << "\" viewBox=\"0 0 " << st.width << ' ' << st.height << "\">\n";
    os << "<!-- " << kVersion << " -->\n<!-- config: " << cfg << " -->\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"" << st.background << "\"/>\n";
    os << "<defs><clipPath id=\"plot\"><rect x=\"" << st.margin << "\" y=\"" << st.margin << "\" width=\"" << pw
       << "\" height=\"" << ph << "\"/></clipPath></defs>\n";
    os << "<line x1=\"" << st.margin << "\" y1=\"" << sy(0) << "\" x2=\"" << st.margin + pw << "\" y2=\"" << sy(0)
       << "\" stroke=\"" << st.axis_colour << "\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << st.margin + pw << "\" y=\"" << sy(0) + 18 << "\" font-size=\"12\" text-anchor=\"end\" fill=\""
       << st.axis_colour << "\">x</text>\n";
    os << "<text x=\"" << st.margin - 6 << "\" y=\"" << st.margin + 4 << "\" font-size=\"12\" text-anchor=\"end\" fill=\""
       << st.axis_colour << "\">t</text>\n";
    os << "<g clip-path=\"url(#plot)\" stroke-linecap=\"round\">\n";
    for (const Particle& p : trace.particles) {
        const double t_end = p.alive ? tmax : p.death_time;
        double stroke = st.arrow_stroke;
        std::string_view c;
        if (p.species == Species::Blockade) {
            c = st.blockade_colour;
            stroke = st.blockade_stroke;
        } else if (p.species == Species::GeneratedBlockade) {
            c = st.generated_colour;
            stroke = st.blockade_stroke;
        } else {
            c = st.arrow_colour;
        }
        os << "<line x1=\"" << format_double(sx(p.birth_position)) << "\" y1=\"" << format_double(sy(p.birth_time))
           << "\" x2=\"" << format_double(sx(p.position_at(t_end))) << "\" y2=\"" << format_double(sy(t_end))
           << "\" stroke=\"" << c << "\" stroke-width=\"" << stroke << "\"/>\n";
    }
    os << "</g>\n</svg>\n";
}

}  // namespace fcba
