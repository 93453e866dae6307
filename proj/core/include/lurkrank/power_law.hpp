#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

namespace lurk {

/// Discrete power law p(x) = x^-alpha / zeta(alpha, x_min) for x >= x_min.
struct PowerLawFit {
    double alpha = 0.0;
    std::uint64_t x_min = 1;
    /// Max gap between the empirical and fitted CDFs over the tail.
    double ks_statistic = 0.0;
    std::size_t tail_size = 0;
};

/// Minimum number of samples at or above x_min.
inline constexpr std::size_t kMinPowerLawTail = 50;

/// P(X <= x) of the discrete power law.
double power_law_cdf(std::uint64_t x, double alpha, std::uint64_t x_min);

/// Maximum-likelihood exponent for a fixed x_min, plus its KS statistic.
/// With no x_min, every distinct sample value leaving a large enough tail is
/// tried and the fit with the smallest KS statistic wins.
///
/// Throws InvalidArgument when the tail holds fewer than kMinPowerLawTail
/// samples, contains a zero, or is degenerate (a single distinct value).
PowerLawFit power_law_fit(std::span<const std::uint64_t> samples, std::optional<std::uint64_t> x_min = std::nullopt);

} // namespace lurk
