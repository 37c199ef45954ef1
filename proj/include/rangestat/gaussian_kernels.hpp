#pragma once

#include <cmath>
#include <stdexcept>

namespace rangestat {

// Variance parameter of the Gaussian kernel.  For a drifted/scaled process
// observed over horizon T this is the composite sigma^2 * T, so every series
// formula downstream can treat the kernel as single-parameter.
struct TimeScale {
    double t;

    explicit TimeScale(double t_) : t(t_) {
        if (!std::isfinite(t) || t <= 0.0)
            throw std::domain_error("TimeScale: t must be finite and > 0");
    }
};

namespace detail {

// Beyond 40 standard deviations the exponent is below -800: exp underflows
// to 0 anyway, and cutting off explicitly keeps downstream products such as
// n^2 * g''(huge) from manufacturing NaN out of 0 * inf.
inline bool underflows(double x, double t) { return x * x > 1600.0 * t; }

inline void check_arg(double x) {
    if (!std::isfinite(x))
        throw std::domain_error("gaussian kernel: x must be finite");
}

}  // namespace detail

inline constexpr double two_pi = 6.283185307179586476925286766559;

// g_t(x) = exp(-x^2 / 2t) / sqrt(2 pi t)
inline double g(double x, TimeScale ts) {
    detail::check_arg(x);
    if (detail::underflows(x, ts.t)) return 0.0;
    return std::exp(-x * x / (2.0 * ts.t)) / std::sqrt(two_pi * ts.t);
}

// g'_t(x) = -x exp(-x^2 / 2t) / sqrt(2 pi t^3)
inline double g_prime(double x, TimeScale ts) {
    detail::check_arg(x);
    if (detail::underflows(x, ts.t)) return 0.0;
    return -x * std::exp(-x * x / (2.0 * ts.t)) / std::sqrt(two_pi * ts.t * ts.t * ts.t);
}

// g''_t(x) = (x^2 - t) exp(-x^2 / 2t) / sqrt(2 pi t^5)
inline double g_second(double x, TimeScale ts) {
    detail::check_arg(x);
    if (detail::underflows(x, ts.t)) return 0.0;
    const double t = ts.t;
    return (x * x - t) * std::exp(-x * x / (2.0 * t)) / std::sqrt(two_pi * t * t * t * t * t);
}

}  // namespace rangestat
