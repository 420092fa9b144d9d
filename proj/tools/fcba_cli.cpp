#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fcba/config.hpp"
#include "fcba/engine.hpp"
#include "fcba/estimators.hpp"
#include "fcba/io.hpp"
#include "fcba/theory.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kIdentityFail = 2, kInconclusive = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag values; unset flags leave the config file untouched.
struct Overrides {
    std::string config_file;
    std::optional<double> a, b, alpha, beta, p, tolerance, central_fraction, epsilon, shield_fraction;
    std::vector<double> p_grid;
    std::optional<std::int64_t> n, trials;
    std::vector<std::int64_t> n_schedule;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> side, out;
    std::optional<int> K, i_max, shield_depth;
    std::optional<unsigned> workers;
    bool json_out = false;
    bool check = false;
};

void add_common(CLI::App* app, Overrides& o) {
    app->add_option("--config", o.config_file, "JSON config file");
    app->add_option("--a", o.a, "arrow-arrow one-survivor probability");
    app->add_option("--b", o.b, "arrow-arrow coalescence probability");
    app->add_option("--alpha", o.alpha, "strong blockade collision probability");
    app->add_option("--beta", o.beta, "weak blockade collision probability");
    app->add_option("--p", o.p, "blockade density");
    app->add_option("--p-grid", o.p_grid, "list of densities")->delimiter(',');
    app->add_option("--n", o.n, "particles per trial");
    app->add_option("--n-schedule", o.n_schedule, "window sizes for phase-sweep")->delimiter(',');
    app->add_option("--trials", o.trials, "Monte Carlo trials");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--side", o.side, "right_half_line or two_sided");
    app->add_option("--tolerance", o.tolerance, "solver tolerance");
    app->add_option("--K", o.K, "truncation index for the beta sums (0 = automatic)");
    app->add_option("--i-max", o.i_max, "largest visit power checked");
    app->add_option("--central-fraction", o.central_fraction, "central window for blockade survival");
    app->add_option("--epsilon", o.epsilon, "survival threshold for phase classification");
    app->add_option("--shield-fraction", o.shield_fraction, "certification shield region");
    app->add_option("--shield-depth", o.shield_depth, "certification shield size");
    app->add_option("--workers", o.workers, "worker threads (default: available parallelism)");
    app->add_option("--out", o.out, "output directory (overrides FCBA_OUTPUT_DIR)");
    app->add_flag("--json", o.json_out, "print JSON");
}

fcba::RunConfig build_config(const Overrides& o) {
    fcba::RunConfig c;
    if (!o.config_file.empty()) {
        std::ifstream in(o.config_file);
        if (!in) throw UsageError("cannot open config file " + o.config_file);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw UsageError(std::string("config file is not valid JSON: ") + e.what());
        }
        fcba::apply_json(c, j);
    }
    if (o.a) c.a = *o.a;
    if (o.b) c.b = *o.b;
    if (o.alpha) c.alpha = *o.alpha;
    if (o.beta) c.beta = *o.beta;
    if (o.p) c.p = *o.p;
    if (!o.p_grid.empty()) c.p_grid = o.p_grid;
    if (o.n) c.n = *o.n;
    if (!o.n_schedule.empty()) c.n_schedule = o.n_schedule;
    if (o.trials) c.trials = *o.trials;
    if (o.seed) c.seed = *o.seed;
    if (o.side) fcba::apply_json(c, json{{"side", *o.side}});
    if (o.tolerance) c.tolerance = *o.tolerance;
    if (o.K) c.K = *o.K;
    if (o.i_max) c.i_max = *o.i_max;
    if (o.central_fraction) c.central_fraction = *o.central_fraction;
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.shield_fraction) c.shield_fraction = *o.shield_fraction;
    if (o.shield_depth) c.shield_depth = *o.shield_depth;
    if (o.workers) c.workers = *o.workers;
    if (o.out) c.output_dir = *o.out;
    c.params();  // validates
    return c;
}

fs::path output_dir(const fcba::RunConfig& c) {
    fs::path dir = "fcba_out";
    if (const char* env = std::getenv("FCBA_OUTPUT_DIR"); env && *env) dir = env;
    if (!c.output_dir.empty()) dir = c.output_dir;
    fs::create_directories(dir);
    return dir;
}

json envelope(const fcba::RunConfig& c, std::string_view command) {
    return {{"version", fcba::kVersion}, {"command", command}, {"config", fcba::to_json(c)}};
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

fcba::RunOptions run_options(const fcba::RunConfig& c) {
    fcba::RunOptions o;
    o.n = c.n;
    o.trials = c.trials;
    o.seed = c.seed;
    o.spacing = c.spacing;
    o.policy = {c.shield_fraction, c.shield_depth};
    o.workers = c.workers;
    return o;
}

double require_p(const fcba::RunConfig& c) {
    if (!c.p) throw UsageError("this subcommand needs --p (or p in the config)");
    return *c.p;
}

int cmd_pc(const fcba::RunConfig& c, bool as_json) {
    const auto P = c.params();
    const double pc = fcba::pc_closed_form(P);
    if (!(pc > 0.0 && pc < 1.0))
        std::cerr << "warning: p_c = " << pc << " lies outside (0, 1); every p > 0 is on the supercritical branch\n";
    if (as_json) {
        json j = envelope(c, "pc");
        j["p_c"] = pc;
        j["p_c_printed_g"] = fcba::pc_from_g(P, fcba::GForm::AsPrinted);
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << std::setprecision(12) << pc << '\n';
    }
    return kOk;
}

int cmd_solve_q(const fcba::RunConfig& c) {
    const auto P = c.params();
    const auto grid = c.grid();
    if (grid.empty()) throw UsageError("solve-q needs --p or --p-grid");
    std::ostringstream csv;
    csv << "# " << fcba::kVersion << "\n# config: " << fcba::to_json(c).dump() << "\n";
    csv << "p,q,branch,residual\n";
    for (double p : grid) {
        const auto s = fcba::solve_q(P, p, c.tolerance);
        csv << fcba::format_double(s.p) << ',' << fcba::format_double(s.q) << ',' << fcba::to_string(s.branch) << ','
            << fcba::format_double(s.residual) << '\n';
    }
    write_file(output_dir(c) / "solve_q.csv", csv.str());
    std::cout << csv.str();
    return kOk;
}

int cmd_simulate(const fcba::RunConfig& c, bool check) {
    const auto P = c.params();
    fcba::InitialConfig ic;
    ic.n = c.n;
    ic.side = c.side;
    ic.p = require_p(c);
    ic.spacing = c.spacing;
    ic.seed = c.seed;
    fcba::validate_config(ic);
    const fcba::Trace trace = fcba::run(ic, P);
    if (check) fcba::validate_trace(trace);
    const json cfg = fcba::to_json(c);
    const fs::path dir = output_dir(c);
    std::ostringstream csv, svg;
    fcba::write_events_csv(csv, trace, cfg);
    fcba::write_svg(svg, trace, cfg);
    write_file(dir / "events.csv", csv.str());
    write_file(dir / "trace.svg", svg.str());

    json summary = envelope(c, "simulate");
    summary["events"] = trace.events.size();
    summary["survivors"] = trace.survivors.size();
    summary["end_time"] = trace.end_time;
    if (c.side == fcba::Side::RightHalfLine) {
        const auto o = fcba::origin_outcome(trace, {c.shield_fraction, c.shield_depth});
        summary["origin_outcome"] = fcba::to_string(o.kind);
        if (o.first_visit_time) summary["first_visit_time"] = *o.first_visit_time;
        summary["visit_times"] = fcba::origin_visit_times(trace);
    }
    write_file(dir / "simulate.json", summary.dump(2) + "\n");
    std::cout << "events " << trace.events.size() << ", survivors " << trace.survivors.size() << ", files in "
              << dir.string() << '\n';
    return kOk;
}

int cmd_estimate_q(const fcba::RunConfig& c) {
    const auto P = c.params();
    const auto grid = c.grid();
    if (grid.empty()) throw UsageError("estimate-q needs --p or --p-grid");
    json out = envelope(c, "estimate-q");
    out["results"] = json::array();
    for (double p : grid) {
        const auto e = fcba::estimate_q(P, p, run_options(c));
        const auto s = fcba::solve_q(P, p, c.tolerance);
        out["results"].push_back({{"p", p}, {"estimate", fcba::to_json(e)}, {"solve_q", fcba::to_json(s)}});
        std::cout << "p=" << p << " q_hat=" << e.point << " ci=[" << e.ci_low << ", " << e.ci_high << "] band=["
                  << e.uncertain_low << ", " << e.uncertain_high << "] certified=" << e.certified_fraction
                  << " solve_q=" << s.q << '\n';
    }
    write_file(output_dir(c) / "estimate_q.json", out.dump(2) + "\n");
    return kOk;
}

int cmd_verify(const fcba::RunConfig& c) {
    const auto P = c.params();
    const double p = require_p(c);
    const auto suite = fcba::identity_suite(P, p, c.K, c.i_max, run_options(c));
    json out = envelope(c, "verify");
    out["q"] = fcba::to_json(suite.q);
    out["p_hat"] = fcba::to_json(suite.p_hat);
    out["reports"] = json::array();
    int fails = 0, inconclusive = 0;
    auto tally = [&](fcba::Verdict v) {
        if (v == fcba::Verdict::Fail) ++fails;
        if (v == fcba::Verdict::Inconclusive) ++inconclusive;
    };
    for (const auto& r : suite.reports) {
        out["reports"].push_back(fcba::to_json(r));
        tally(r.verdict);
        std::cout << std::left << std::setw(40) << r.name << " mc=" << r.mc_value.point << " closed=" << r.closed_value
                  << " z=" << r.z_score << " " << fcba::to_string(r.verdict) << '\n';
    }
    const double pc = fcba::pc_closed_form(P);
    const double g = fcba::g_eval(P, pc, 1.0).g;
    const auto gv = std::abs(g) < 1e-9 ? fcba::Verdict::Pass : fcba::Verdict::Fail;
    tally(gv);
    out["closed_checks"] = json::array({{{"name", "g(p_c, 1)"}, {"value", g}, {"verdict", fcba::to_string(gv)}}});
    std::cout << std::left << std::setw(40) << "g(p_c, 1)" << " value=" << g << " " << fcba::to_string(gv) << '\n';
    if (suite.q.point * P.beta < 1) {
        out["informational"] = {
            {"r_closed_as_printed", fcba::r_closed_as_printed(P, p, suite.p_hat.point, suite.q.point)}};
    }
    out["failures"] = fails;
    out["inconclusive"] = inconclusive;
    write_file(output_dir(c) / "verify.json", out.dump(2) + "\n");
    if (fails) {
        std::cout << fails << " identity failure(s)\n";
        return kIdentityFail;
    }
    if (inconclusive) {
        std::cout << inconclusive << " inconclusive\n";
        return kInconclusive;
    }
    return kOk;
}

int cmd_phase_sweep(const fcba::RunConfig& c) {
    const auto P = c.params();
    if (c.p_grid.empty()) throw UsageError("phase-sweep needs a non-empty --p-grid");
    fcba::PcOptions o;
    if (!c.n_schedule.empty()) o.n_schedule = c.n_schedule;
    o.trials = c.trials;
    o.seed = c.seed;
    o.central_fraction = c.central_fraction;
    o.epsilon = c.epsilon;
    o.spacing = c.spacing;
    o.workers = c.workers;
    const auto br = fcba::empirical_pc(P, c.p_grid, o);
    json out = envelope(c, "phase-sweep");
    out["bracket"] = fcba::to_json(br);
    out["p_c"] = fcba::pc_closed_form(P);
    out["p_c_printed_g"] = fcba::pc_from_g(P, fcba::GForm::AsPrinted);
    // survival predicted by each form of g, for comparison with the largest window
    json theory = json::array();
    for (double p : c.p_grid) {
        const double qr = fcba::solve_q(P, p, c.tolerance).q;
        const double qp = fcba::solve_q(P, p, c.tolerance, fcba::GForm::AsPrinted).q;
        theory.push_back({{"p", p},
                          {"survival_recursion_g", fcba::blockade_survival_closed(P.beta, qr)},
                          {"survival_printed_g", fcba::blockade_survival_closed(P.beta, qp)}});
    }
    out["theory_survival"] = theory;
    std::ostringstream csv;
    csv << "# " << fcba::kVersion << "\n# config: " << fcba::to_json(c).dump() << "\n";
    csv << "p,n,surviving,total,fraction,se,ci_low,ci_high\n";
    for (const auto& s : br.points) {
        csv << fcba::format_double(s.p) << ',' << s.n << ',' << s.surviving << ',' << s.total << ','
            << fcba::format_double(s.fraction) << ',' << fcba::format_double(s.se) << ','
            << fcba::format_double(s.ci_low) << ',' << fcba::format_double(s.ci_high) << '\n';
    }
    const fs::path dir = output_dir(c);
    write_file(dir / "phase_sweep.json", out.dump(2) + "\n");
    write_file(dir / "phase_sweep.csv", csv.str());
    std::cout << "bracket [" << br.p_lower << ", " << br.p_upper << "]\n";
    for (std::size_t i = 0; i < c.p_grid.size(); ++i)
        std::cout << "  p=" << c.p_grid[i] << " " << fcba::to_string(br.classes[i]) << '\n';
    for (const auto& w : br.warnings) std::cout << "warning: " << w << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Four-parameter coalescing ballistic annihilation: simulator and verification tools"};
    app.require_subcommand(1);
    Overrides o;
    auto* pc = app.add_subcommand("pc", "closed-form critical density");
    auto* sq = app.add_subcommand("solve-q", "q(p) from the implicit equation");
    auto* sim = app.add_subcommand("simulate", "one trace: events CSV and SVG diagram");
    auto* eq = app.add_subcommand("estimate-q", "Monte Carlo estimate of q against the solver");
    auto* ver = app.add_subcommand("verify", "identity suite");
    auto* ps = app.add_subcommand("phase-sweep", "empirical critical density bracket");
    for (auto* s : {pc, sq, sim, eq, ver, ps}) add_common(s, o);
    sim->add_flag("--check", o.check, "validate trace invariants");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        const fcba::RunConfig c = build_config(o);
        if (*pc) return cmd_pc(c, o.json_out);
        if (*sq) return cmd_solve_q(c);
        if (*sim) return cmd_simulate(c, o.check);
        if (*eq) return cmd_estimate_q(c);
        if (*ver) return cmd_verify(c);
        if (*ps) return cmd_phase_sweep(c);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        // ConstraintError and ConfigError
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}
