#include "rangestat/analytic_densities.hpp"

#include <cmath>
#include <string>

namespace rangestat {

namespace {

// Hard ceiling for automatic truncation escalation.  The image series needs
// roughly n > 20 sigma sqrt(T) / spacing terms before the kernel underflow
// cutoff is reached, so 2^14 covers spacings down to ~1.3e-3 sigma sqrt(T);
// anything smaller is a degenerate geometry we refuse to answer for.
constexpr int kEscalationCap = 1 << 14;

double drift_tilt(const ProcessParams& p, double x) {
    const double s2 = p.sigma * p.sigma;
    return std::exp(p.mu * x / s2 - p.mu * p.mu * p.t / (2.0 * s2));
}

// Sums term(n) over n in [-N, N], escalating N from sc.n_max by doubling
// until the outermost ring |term(N)| + |term(-N)| is within sc.tail_tol or
// the cap is hit.  Terms decay like exp(-c n^2), so the ring magnitude is an
// honest proxy for the whole tail.
template <class TermFn>
double sum_symmetric_images(const SeriesControl& sc, TermFn&& term) {
    double sum = term(0);
    int summed = 0;
    int target = sc.n_max;
    while (true) {
        for (int n = summed + 1; n <= target; ++n)
            sum += term(n) + term(-n);
        summed = target;
        const double ring = std::abs(term(target)) + std::abs(term(-target));
        if (ring <= sc.tail_tol) return sum;
        if (target >= kEscalationCap)
            throw std::domain_error(
                "image series did not converge by n_max=" + std::to_string(kEscalationCap) +
                " (last ring " + std::to_string(ring) +
                "); barrier spacing or range is too small relative to sigma*sqrt(t)");
        target = std::min(2 * target, kEscalationCap);
    }
}

}  // namespace

double psi_kernel(const ProcessParams& p, const Barriers& b, const SeriesControl& sc) {
    if (b.x < -b.l || b.x > b.h) return 0.0;
    const TimeScale v{p.sigma * p.sigma * p.t};
    const double period = 2.0 * (b.h + b.l);
    const double series = sum_symmetric_images(sc, [&](int n) {
        const double c = n * period;
        return g(c - b.x, v) - g(c + b.x - 2.0 * b.h, v);
    });
    return drift_tilt(p, b.x) * series;
}

double trivariate_density(const ProcessParams& p, const Barriers& b, const SeriesControl& sc) {
    if (b.x < -b.l || b.x > b.h) return 0.0;
    const TimeScale v{p.sigma * p.sigma * p.t};
    const double period = 2.0 * (b.h + b.l);
    const double series = sum_symmetric_images(sc, [&](int n) {
        if (n == 0) return 0.0;  // killed by the 4n factor
        const double c = n * period;
        const double dn = n;
        return 4.0 * dn *
               (dn * g_second(c - b.x, v) - (dn - 1.0) * g_second(c + b.x - 2.0 * b.h, v));
    });
    return drift_tilt(p, b.x) * series;
}

double trivariate_density_douady_form(const ProcessParams& p, const Barriers& b,
                                      const SeriesControl& sc) {
    if (b.x < -b.l || b.x > b.h) return 0.0;
    const TimeScale v{p.sigma * p.sigma * p.t};
    const double period = 2.0 * (b.h + b.l);
    const double series = sum_symmetric_images(sc, [&](int n) {
        if (n == 0) return 0.0;
        const double c = n * period;
        const double dn = n;
        return 4.0 * dn *
               (dn * g_second(c + b.x, v) - (dn + 1.0) * g_second(c - b.x + 2.0 * b.h, v));
    });
    return drift_tilt(p, b.x) * series;
}

double joint_range_terminal_density(const ProcessParams& p, double r, double x,
                                    const SeriesControl& sc) {
    if (!std::isfinite(r) || r <= 0.0)
        throw std::domain_error("joint_range_terminal_density: r must be finite and > 0");
    if (!std::isfinite(x))
        throw std::domain_error("joint_range_terminal_density: x must be finite");
    const double u = std::abs(x);
    // The support is the open band |x| < r; the density vanishes on its
    // boundary, where evaluating the series would leave cancellation dust.
    if (u >= r) return 0.0;
    const TimeScale v{p.sigma * p.sigma * p.t};
    const double width = r - u;  // length of the admissible h-interval
    const double series = sum_symmetric_images(sc, [&](int n) {
        const double c = 2.0 * n * r;
        const double dn = n;
        // First family: the integrated 4n^2 g'' term is constant in h, so it
        // simply picks up the interval length.  Second family: antiderivative
        // of the h-dependent terms evaluated at the interval endpoints, where
        // the kernel arguments become 2nr + |x| and 2nr + 2r - |x|.
        return 4.0 * dn * dn * g_second(c + x, v) * width -
               2.0 * dn * (dn + 1.0) * (g_prime(c + 2.0 * r - u, v) - g_prime(c + u, v));
    });
    return drift_tilt(p, x) * series;
}

}  // namespace rangestat
