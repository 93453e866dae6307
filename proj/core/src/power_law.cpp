#include "lurkrank/power_law.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "lurkrank/error.hpp"

namespace lurk {

namespace {

constexpr double kAlphaLo = 1.0 + 1e-6;
constexpr double kAlphaHi = 20.0;

double hurwitz_zeta(double s, double q) {
    gsl_sf_result result;
    const int status = gsl_sf_hzeta_e(s, q, &result);
    if (status != GSL_SUCCESS) {
        throw Error(std::string("Hurwitz zeta failed: ") + gsl_strerror(status));
    }
    return result.val;
}

struct GslErrorsOff {
    GslErrorsOff() : previous(gsl_set_error_handler_off()) {}
    ~GslErrorsOff() { gsl_set_error_handler(previous); }
    gsl_error_handler_t *previous;
};

// `tail` is sorted and every value is >= x_min.
PowerLawFit fit_tail(std::span<const std::uint64_t> tail, std::uint64_t x_min) {
    const auto n = static_cast<double>(tail.size());
    double log_sum = 0.0;
    for (const auto x : tail) {
        log_sum += std::log(static_cast<double>(x));
    }
    const double xm = static_cast<double>(x_min);

    auto neg_loglik = [&](double alpha) { return n * std::log(hurwitz_zeta(alpha, xm)) + alpha * log_sum; };
    const auto [alpha, _] = boost::math::tools::brent_find_minima(neg_loglik, kAlphaLo, kAlphaHi, 40);

    PowerLawFit fit;
    fit.alpha = alpha;
    fit.x_min = x_min;
    fit.tail_size = tail.size();

    const double norm = hurwitz_zeta(alpha, xm);
    auto cdf = [&](std::uint64_t x) { return 1.0 - hurwitz_zeta(alpha, static_cast<double>(x) + 1.0) / norm; };
    double ks = 0.0;
    std::size_t i = 0;
    while (i < tail.size()) {
        const auto value = tail[i];
        const double below = static_cast<double>(i) / n;
        if (value > x_min) {
            ks = std::max(ks, std::abs(below - cdf(value - 1)));
        }
        while (i < tail.size() && tail[i] == value) {
            ++i;
        }
        ks = std::max(ks, std::abs(static_cast<double>(i) / n - cdf(value)));
    }
    fit.ks_statistic = ks;
    return fit;
}

} // namespace

double power_law_cdf(std::uint64_t x, double alpha, std::uint64_t x_min) {
    if (x < x_min) {
        return 0.0;
    }
    GslErrorsOff guard;
    return 1.0 - hurwitz_zeta(alpha, static_cast<double>(x) + 1.0) / hurwitz_zeta(alpha, static_cast<double>(x_min));
}

PowerLawFit power_law_fit(std::span<const std::uint64_t> samples, std::optional<std::uint64_t> x_min) {
    GslErrorsOff guard;
    std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    auto tail_from = [&](std::uint64_t lo) {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), lo);
        return std::span<const std::uint64_t>(&*it, static_cast<std::size_t>(sorted.end() - it));
    };
    auto check = [](std::span<const std::uint64_t> tail) {
        if (tail.size() < kMinPowerLawTail) {
            throw InvalidArgument("power-law fit needs at least " + std::to_string(kMinPowerLawTail) +
                                  " samples at or above x_min");
        }
        if (tail.front() == 0) {
            throw InvalidArgument("power-law samples must be positive");
        }
        if (tail.front() == tail.back()) {
            throw InvalidArgument("degenerate power-law fit: all samples are equal");
        }
    };

    if (x_min) {
        if (*x_min == 0) {
            throw InvalidArgument("x_min must be positive");
        }
        auto tail = sorted.empty() ? std::span<const std::uint64_t>{} : tail_from(*x_min);
        check(tail);
        return fit_tail(tail, *x_min);
    }

    if (sorted.empty()) {
        check({});
    }
    check(tail_from(std::max<std::uint64_t>(sorted.front(), 1)));
    std::optional<PowerLawFit> best;
    std::uint64_t previous = 0;
    for (const auto candidate : sorted) {
        if (candidate == previous || candidate == 0) {
            continue;
        }
        previous = candidate;
        const auto tail = tail_from(candidate);
        if (tail.size() < kMinPowerLawTail || tail.front() == tail.back()) {
            break;
        }
        auto fit = fit_tail(tail, candidate);
        if (!best || fit.ks_statistic < best->ks_statistic) {
            best = fit;
        }
    }
    return *best;
}

} // namespace lurk
