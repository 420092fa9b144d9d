#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fcba {

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

/// Wilson score interval for k successes out of n (n = 0 gives [0, 1]).
Interval wilson_interval(std::int64_t k, std::int64_t n, double confidence = 0.95);

/// Two-sided normal critical value, e.g. 1.96 for 0.95.
double normal_critical(double confidence);

/// Upper critical value of the chi-square distribution with df degrees of freedom.
double chi_square_critical(int df, double significance);

/// Pearson statistic of observed counts against expected probabilities.
double chi_square_statistic(std::span<const std::int64_t> observed, std::span<const double> probs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> x, std::vector<double> y);

/// Mean and standard error of per-trial values.
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe mean_se(std::span<const double> values);

}  // namespace fcba
