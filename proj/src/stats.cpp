#include "fcba/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace fcba {

double normal_critical(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in (0, 1)");
    return boost::math::quantile(boost::math::normal{}, 0.5 + confidence / 2);
}

Interval wilson_interval(std::int64_t k, std::int64_t n, double confidence) {
    if (k < 0 || n < 0 || k > n) throw std::invalid_argument("wilson_interval: need 0 <= k <= n");
    if (n == 0) return {0.0, 1.0};
    const double z = normal_critical(confidence);
    const double nn = static_cast<double>(n);
    const double ph = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double centre = (ph + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z / (1 + z2 / nn) * std::sqrt(ph * (1 - ph) / nn + z2 / (4 * nn * nn));
    // the interval always contains the point; clamp rounding at the ends
    return {std::min(ph, std::max(0.0, centre - half)), std::max(ph, std::min(1.0, centre + half))};
}

double chi_square_critical(int df, double significance) {
    if (df < 1) throw std::invalid_argument("chi_square_critical: df must be positive");
    return boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), significance));
}

double chi_square_statistic(std::span<const std::int64_t> observed, std::span<const double> probs) {
    if (observed.size() != probs.size()) throw std::invalid_argument("chi_square_statistic: size mismatch");
    double total = 0.0;
    for (auto o : observed) total += static_cast<double>(o);
    double stat = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        const double e = total * probs[i];
        if (e <= 0.0) {
            if (observed[i] != 0) return INFINITY;
            continue;
        }
        const double d = static_cast<double>(observed[i]) - e;
        stat += d * d / e;
    }
    return stat;
}

KsResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        d = std::max(d, std::abs(i / nx - j / ny));
    }
    const double ne = nx * ny / (nx + ny);
    const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
    // Kolmogorov tail series
    double p = 0.0;
    if (lambda < 0.2) {
        p = 1.0;
    } else {
        for (int k = 1; k <= 100; ++k) {
            const double term = 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
            p += term;
            if (std::abs(term) < 1e-12) break;
        }
        p = std::clamp(p, 0.0, 1.0);
    }
    return {d, p};
}

MeanSe mean_se(std::span<const double> values) {
    MeanSe out;
    const auto n = values.size();
    if (n == 0) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(n);
    if (n < 2) return out;
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
    return out;
}

}  // namespace fcba
