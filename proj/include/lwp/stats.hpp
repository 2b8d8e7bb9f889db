#pragma once

#include <cstddef>
#include <span>

namespace lwp {

/// Two-sided standard-normal critical values.
inline constexpr double kZ99 = 2.5758293035489004;
inline constexpr double kZ999 = 3.2905267314919255;
inline constexpr double kThreeSigma = 3.0;

/// z such that P(|N(0,1)| <= z) = confidence.
double two_sided_z(double confidence);

/// Normal-approximation half-width of a binomial proportion with success
/// probability p estimated from n trials.
double binomial_half_width(double p, std::size_t n, double z);

struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t count = 0;

    [[nodiscard]] double half_width(double z) const { return z * std_error; }
};

/// Sample mean and standard error, summed in index order.
MeanEstimate estimate_mean(std::span<const double> values);

}  // namespace lwp
