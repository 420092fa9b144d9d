#include "fcba/theory.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace fcba {

namespace {

void require_beta_q(double beta, double q) {
    if (!(beta * q < 1.0)) throw std::domain_error("closed forms require beta * q < 1");
}

}  // namespace

double pc_closed_form(const ReactionParams& P) {
    const double num = (1 - P.beta) * (1 - P.beta) - P.b * (1 - P.alpha);
    const double den = 4 - (P.a + P.b) * (1 - P.alpha) - P.beta * (3 - P.alpha - P.beta) - 3 * P.alpha;
    if (std::abs(den) < 1e-12) {
        std::ostringstream os;
        os << "pc_closed_form: degenerate denominator " << den;
        throw DegenerateError(os.str());
    }
    return num / den;
}

GParts g_eval(const ReactionParams& P, double u, double v, GForm form) {
    const double a = P.a, b = P.b, al = P.alpha, be = P.beta, c = P.c, xi = P.xi;
    const double w = (be * v - 1) * (be * v - 1);
    GParts out;
    if (form == GForm::Recursion) {
        out.f1 = u * v * (((1 - al) * c - be * xi) * v + 2 * xi);
        out.f2 = w * (v * (a - 2) - 1) + b * (1 - al) * v * v * ((1 + be) * v - 1) + u;
        out.f3 = w * (a - 2) + b * (1 - al) * v * ((1 + be) * v - 2);
    } else {
        out.f1 = u * v *
                 (-v * (-al * a + a + al + be * (al + be) * (b * v * v - 1) - b * be * v * (v + 2) + b + be - 1) -
                  2 * (al + be - 1));
        out.f2 = w * (v * (a + b * (v - 1) * v - 2) - 1) + u;
        out.f3 = w * (a + b * (v - 2) * v - 2);
    }
    if (out.f3 == 0.0) {
        std::ostringstream os;
        os << "g_eval: f3 = 0 at u=" << u << " v=" << v << " (a=" << a << " b=" << b << " alpha=" << al
           << " beta=" << be << ")";
        throw DegenerateError(os.str());
    }
    out.g = -v + (out.f1 + out.f2) / out.f3;
    return out;
}

std::string_view to_string(QBranch b) noexcept {
    return b == QBranch::SubcriticalOne ? "subcritical_one" : "supercritical_root";
}

namespace {

constexpr int kScan = 2048;

double g_or_nan(const ReactionParams& P, double u, double v, GForm form) {
    try {
        return g_eval(P, u, v, form).g;
    } catch (const DegenerateError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

double bisect(const ReactionParams& P, double u, double lo, double hi, double glo, double tol, GForm form) {
    for (int it = 0; it < 200 && hi - lo > tol * 1e-3; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g_or_nan(P, u, mid, form);
        if (gm == 0.0) return mid;
        if ((gm > 0) == (glo > 0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Sign changes of g(u, .) on (0, 1) that are genuine roots rather than poles.
std::vector<double> roots_in_unit(const ReactionParams& P, double u, double tol, GForm form) {
    std::vector<double> roots;
    double vprev = 0.0;
    double gprev = g_or_nan(P, u, 0.0, form);
    for (int k = 1; k <= kScan; ++k) {
        const double v = static_cast<double>(k) / kScan;
        const double gv = g_or_nan(P, u, v, form);
        if (std::isfinite(gprev) && std::isfinite(gv) && gprev != 0.0 && (gprev > 0) != (gv > 0)) {
            const double r = bisect(P, u, vprev, v, gprev, tol, form);
            const double res = std::abs(g_or_nan(P, u, r, form));
            if (res < std::max(1e3 * tol, 1e-9)) roots.push_back(r);
        }
        vprev = v;
        gprev = gv;
    }
    return roots;
}

}  // namespace

double pc_from_g(const ReactionParams& P, GForm form) {
    const double g0 = g_eval(P, 0.0, 1.0, form).g;
    const double g1 = g_eval(P, 1.0, 1.0, form).g;
    if (g1 == g0) throw DegenerateError("pc_from_g: g(u, 1) does not depend on u");
    return g0 / (g0 - g1);
}

double blockade_survival_closed(double beta, double q) {
    require_beta_q(beta, q);
    const double x = (1 - q) / (1 - beta * q);
    return x * x;
}

QSolution solve_q(const ReactionParams& P, double p, double tol, GForm form) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("solve_q: p must lie in [0, 1]");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_q: tol must be positive");
    QSolution sol;
    sol.p = p;
    const double pc = form == GForm::Recursion ? pc_closed_form(P) : pc_from_g(P, form);
    if (p <= pc) return sol;
    sol.branch = QBranch::SupercriticalRoot;
    if (p == 1.0) {
        sol.q = 0.0;
        sol.residual = std::abs(g_eval(P, 1.0, 0.0, form).g);
        return sol;
    }
    auto roots = roots_in_unit(P, p, tol, form);
    if (roots.empty()) {
        std::ostringstream os;
        os << "solve_q: no root of g(" << p << ", v) on (0,1); p_c=" << pc << " g(p,0)=" << g_or_nan(P, p, 0.0, form)
           << " g(p,1)=" << g_or_nan(P, p, 1.0, form);
        throw NoRootError(os.str());
    }
    double q = roots.front();
    if (roots.size() > 1) {
        // follow the branch down from q(1) = 0
        double track = 0.0;
        const int steps = std::max(1, static_cast<int>(std::ceil((1.0 - p) / 1e-3)));
        for (int k = 1; k <= steps; ++k) {
            const double pk = 1.0 - (1.0 - p) * k / steps;
            const auto rk = roots_in_unit(P, pk, tol, form);
            if (rk.empty()) continue;
            double best = rk.front();
            for (double r : rk)
                if (std::abs(r - track) < std::abs(best - track)) best = r;
            track = best;
        }
        q = track;
    }
    sol.q = q;
    sol.residual = std::abs(g_eval(P, p, q, form).g);
    return sol;
}

double s_closed(const ReactionParams& P, double p, double p_hat, double q) {
    require_beta_q(P.beta, q);
    const double d = 1 - P.beta * q;
    return (p + p_hat) * (1 - P.alpha) * (1 - P.beta) * q * q / (2 * d * d);
}

double r_closed(const ReactionParams& P, double p, double p_hat, double q) {
    require_beta_q(P.beta, q);
    const double d = 1 - P.beta * q;
    return (p + p_hat) * (1 - P.alpha) * q * (1 - q) / (d * d);
}

double r_closed_as_printed(const ReactionParams& P, double p, double p_hat, double q) {
    require_beta_q(P.beta, q);
    const double d = 1 - P.beta * q;
    return (p + p_hat) * P.alpha * q * (1 - q) / (d * d);
}

double rec2_closed(const ReactionParams& P, double p, double q) {
    require_beta_q(P.beta, q);
    return (P.alpha * p * q + P.xi * p * q * q) / (1 - P.beta * q);
}

double S_closed(double beta, double q) {
    require_beta_q(beta, q);
    const double t = beta * q / (1 - beta * q);
    return 0.5 * t * t;
}

double triple_sum_closed(double beta, double q) {
    require_beta_q(beta, q);
    const double x = beta * q;
    return x * x / (2 * (1 - x));
}

double hatp_from_mutual(const ReactionParams& P, double p_mutual) {
    if (P.c <= 0.0) throw DegenerateError("hatp_from_mutual: c = 0, use the direct estimate of p_hat");
    return P.b / P.c * p_mutual;
}

double hatp_implied(const ReactionParams& P, double p, double q) {
    if (P.c <= 0.0) throw DegenerateError("hatp_implied: c = 0");
    const double D = 1 + P.a / (2 * P.c) + P.b / P.c;
    const double k = P.b / P.c / D;
    const double d = 1 - P.beta * q;
    const double ks = (1 - P.alpha) * (1 - P.beta) * q * q / (2 * d * d);
    const double kr = (1 - P.alpha) * q * (1 - q) / (d * d);
    return k * ((1 - p) / 2 - p * (ks + kr)) / (1 + k * (ks + kr));
}

double recursion_residual(const ReactionParams& P, double p, double q) {
    if (P.c <= 0.0) throw DegenerateError("recursion_residual: c = 0");
    if (!(p > 0.0)) throw std::domain_error("recursion_residual: p must be positive");
    const double ph = hatp_implied(P, p, q);
    const double D = 1 + P.a / (2 * P.c) + P.b / P.c;
    const double s = s_closed(P, p, ph, q);
    const double r = r_closed(P, p, ph, q);
    const double rec2 = rec2_closed(P, p, q);
    const double M = ((1 - p) / 2 - s - r) / D;
    return (1 - p) / 2 + rec2 + (q + P.a / (2 * P.c) + (P.b / P.c) * rec2 / p) * M + s - q;
}

int truncation_index(double beta, double tol) {
    if (!(beta >= 0.0 && beta < 1.0)) throw std::domain_error("truncation_index: beta must lie in [0, 1)");
    if (beta == 0.0) return 1;
    const double d = (1 - beta) * (1 - beta);
    int K = 1;
    while (std::pow(beta, K) * (K + 1) / d >= tol) ++K;
    return K;
}

double truncation_tail(double beta, int K) {
    const double d = (1 - beta) * (1 - beta);
    return 2 * std::pow(beta, K + 2) / d;
}

}  // namespace fcba
