#pragma once

#include <cstdint>

#include "rangestat/gaussian_kernels.hpp"

namespace rangestat {

// Drift, volatility and horizon of the Wiener process W_t = mu t + sigma Z_t.
struct ProcessParams {
    double mu;
    double sigma;
    double t;

    ProcessParams(double mu_, double sigma_, double t_) : mu(mu_), sigma(sigma_), t(t_) {
        if (!std::isfinite(mu))
            throw std::domain_error("ProcessParams: mu must be finite");
        if (!std::isfinite(sigma) || sigma <= 0.0)
            throw std::domain_error("ProcessParams: sigma must be finite and > 0");
        if (!std::isfinite(t) || t <= 0.0)
            throw std::domain_error("ProcessParams: t must be finite and > 0");
    }

    static ProcessParams standard(double t_ = 1.0) { return {0.0, 1.0, t_}; }
};

// Truncation control for every infinite series in the library.
//
// The image-sum (Gaussian) series decay like exp(-c n^2); n_max = 100 covers
// every non-degenerate geometry and the evaluators escalate automatically
// (doubling up to 2^14) whenever the last included term still exceeds
// tail_tol.  The rational s-density series decays only like n^-3, so its
// evaluators use a larger default tolerance (see s_density.hpp) and an
// extrapolated tail when a tighter one is requested.
struct SeriesControl {
    int n_max = 100;
    double tail_tol = 1e-12;

    SeriesControl() = default;
    SeriesControl(int n_max_, double tail_tol_) : n_max(n_max_), tail_tol(tail_tol_) {
        if (n_max < 1)
            throw std::domain_error("SeriesControl: n_max must be >= 1");
        if (!std::isfinite(tail_tol) || tail_tol < 0.0)
            throw std::domain_error("SeriesControl: tail_tol must be finite and >= 0");
    }
};

// Barrier geometry: upper barrier h > 0, lower barrier -l < 0, terminal
// value x.  Densities carry the support indicator 1{-l <= x <= h}.
struct Barriers {
    double h;
    double l;
    double x;

    Barriers(double h_, double l_, double x_) : h(h_), l(l_), x(x_) {
        if (!std::isfinite(h) || h <= 0.0)
            throw std::domain_error("Barriers: h must be finite and > 0");
        if (!std::isfinite(l) || l <= 0.0)
            throw std::domain_error("Barriers: l must be finite and > 0");
        if (!std::isfinite(x))
            throw std::domain_error("Barriers: x must be finite");
    }
};

// psi(T,h,l,x): density (in x) of the event {max <= h, min >= -l, W_T in dx},
// as the drift-tilted image sum
//   tilt(x) * sum_n [ g(2n(h+l) - x, s^2 T) - g(2n(h+l) + x - 2h, s^2 T) ]
// with tilt(x) = exp(mu x / sigma^2 - mu^2 T / (2 sigma^2)).
double psi_kernel(const ProcessParams& p, const Barriers& b, const SeriesControl& sc = {});

// psi''(T,h,l,x) = d^2 psi / dh dl: joint density of (max, -min, terminal)
// at (h, l, x),
//   tilt(x) * sum_n 4n [ n g''(2n(h+l) - x) - (n-1) g''(2n(h+l) + x - 2h) ].
// The n = 0 term vanishes identically.
double trivariate_density(const ProcessParams& p, const Barriers& b, const SeriesControl& sc = {});

// Index-flipped (n -> -n) form of the same density,
//   tilt(x) * sum_n 4n [ n g''(2n(h+l) + x) - (n+1) g''(2n(h+l) - x + 2h) ],
// equal to trivariate_density term-for-term at symmetric truncation.
double trivariate_density_douady_form(const ProcessParams& p, const Barriers& b,
                                      const SeriesControl& sc = {});

// f~(T,r,x): joint density of (range, terminal value), obtained by
// integrating psi'' over the admissible upper barrier h in
// (max(0,x), min(r, r+x)) — an interval of length r - |x|:
//   tilt(x) * sum_n [ 4n^2 g''(2nr + x) (r - |x|)
//                     - 2n(n+1) ( g'(2nr + 2r - |x|) - g'(2nr + |x|) ) ].
double joint_range_terminal_density(const ProcessParams& p, double r, double x,
                                    const SeriesControl& sc = {});

}  // namespace rangestat
