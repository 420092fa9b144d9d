#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "fcba/model.hpp"

namespace fcba {

class DegenerateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Closed-form critical density. Throws DegenerateError if the denominator
/// is below 1e-12 in magnitude. The value is negative when b(1 - alpha) >
/// (1 - beta)^2 and is returned as is; callers decide how to flag it.
double pc_closed_form(const ReactionParams& params);

struct GParts {
    double f1 = 0.0;
    double f2 = 0.0;
    double f3 = 0.0;
    double g = 0.0;
};

// Recursion: f1, f2, f3 rebuilt from the recursion for q, so that g(u, v) = 0
// along (p, q(p)) and g(u, 1) = 0 exactly at pc_closed_form.
// AsPrinted: the older algebraic form, which only agrees with Recursion when b = 0.
enum class GForm : std::uint8_t { Recursion, AsPrinted };

/// Throws DegenerateError when f3 = 0.
GParts g_eval(const ReactionParams& params, double u, double v, GForm form = GForm::Recursion);

enum class QBranch : std::uint8_t { SubcriticalOne, SupercriticalRoot };
std::string_view to_string(QBranch b) noexcept;

struct QSolution {
    double p = 0.0;
    double q = 1.0;
    QBranch branch = QBranch::SubcriticalOne;
    double residual = 0.0;
};

/// Root in u of g(u, 1), which is affine in u. Equals pc_closed_form for
/// GForm::Recursion.
double pc_from_g(const ReactionParams& params, GForm form = GForm::Recursion);

/// q(p): 1 for p <= p_c, otherwise the root of g(p, .) in (0, 1) on the branch
/// reached from q(1) = 0. Throws NoRootError when the scan finds nothing.
/// With GForm::AsPrinted the branch point is pc_from_g of the printed form.
QSolution solve_q(const ReactionParams& params, double p, double tol = 1e-12, GForm form = GForm::Recursion);

/// Probability that an original blockade is never destroyed: every visit from
/// either side must be weak, ((1 - q) / (1 - beta q))^2.
double blockade_survival_closed(double beta, double q);

// Closed forms for the recursion terms. All require beta * q < 1.
double s_closed(const ReactionParams& params, double p, double p_hat, double q);
double r_closed(const ReactionParams& params, double p, double p_hat, double q);
/// Variant of r with factor alpha instead of 1 - alpha, kept for comparison.
double r_closed_as_printed(const ReactionParams& params, double p, double p_hat, double q);
double rec2_closed(const ReactionParams& params, double p, double q);
double S_closed(double beta, double q);
double triple_sum_closed(double beta, double q);

/// p_hat = (b / c) * P(first right arrow mutually annihilates with a left arrow).
/// Throws DegenerateError when c = 0.
double hatp_from_mutual(const ReactionParams& params, double p_mutual);

/// p_hat implied by (p, q) through the s / r decomposition (c > 0).
double hatp_implied(const ReactionParams& params, double p, double q);

/// Right side of the first-particle recursion for q minus q. Independent of
/// g_eval; vanishes exactly at q(p). Requires c > 0 and p > 0.
double recursion_residual(const ReactionParams& params, double p, double q);

/// Truncation index for the beta-weighted visit sums and its tail bound.
int truncation_index(double beta, double tol = 1e-6);
double truncation_tail(double beta, int K);

}  // namespace fcba
