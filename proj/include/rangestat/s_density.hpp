#pragma once

#include <iosfwd>
#include <vector>

#include "rangestat/analytic_densities.hpp"

namespace rangestat {

// Density of the range-scaled terminal value a = W_T / (max - min) of
// standard Brownian motion.  The formula is horizon-free: no t parameter
// appears anywhere in this module.
//
// Unlike the Gaussian image sums, these series decay only like n^-3, so the
// default tolerance is looser and truncation is never escalated.  Requesting
// tail_tol < 1e-8 switches on a Richardson tail estimate (the partial sums
// behave like S_N ~ S_inf - A/N^2, so S_inf ~ S_N + (S_N - S_{N/2})/3).
inline SeriesControl s_series_defaults() { return SeriesControl{100, 1e-8}; }

// Two-sided form: sum over n in [-n_max, n_max] \ {0} with Heaviside-step
// sign bookkeeping; the n = 0 term vanishes identically and the n = -1
// second piece carries coefficient n(n+1) = 0 (skipped explicitly since its
// denominator also vanishes at a = 0).
double s_density_two_sided(double a, const SeriesControl& sc = s_series_defaults());

// One-sided simplified form (the reference evaluator): for u = |a|,
//   sum_{n>=1} [ 16(1-u) n^3 (4n^2 + 3a^2) / (4n^2 - a^2)^3
//                - (8n^3 (1-u) + 2n a^2) / (4n^2 - a^2)^2 ]
//   - sum_{n>=2} n (8(n^2-1)(1-u) - 2a^2) / ((2n-u+2)^2 (2n+u-2)^2)
//   + 2 / (4-u)^2.
double s_density_one_sided(double a, const SeriesControl& sc = s_series_defaults());

// Literal transcription of the published reference algorithm (n = 1 terms
// spelled out, loop n = 2..100); kept verbatim as a fidelity witness for
// s_density_one_sided at n_max = 100.
double s_density_appendix(double a);

// Report of the dominating-series convergence check: the s-series partial
// sum is bounded by the partial sum of
//   sum_{n>=2} (80 n^3 (1-u) a^2 - 2n a^2 + 2a^2) / (4n^2 (4n^2 - a^2)^2)
//   + 2/(4-u)^2 + 1
// at the same truncation, plus tail slack.
struct ConvergenceReport {
    double s_partial_sum;
    double dominating_partial_sum;
    double last_term_magnitude;  // |combined one-sided term| at n = n_max
    bool bounded;                // s_partial_sum <= dominating_partial_sum + 1e-9
};
ConvergenceReport convergence_bound_check(double a, int n_max);

// Precomputed uniform-grid table over [-1, 1] backing CDF and quantile
// queries.  resolution = number of intervals (even, >= 2048 so that the
// composite Simpson CDF is trustworthy); nodes = resolution + 1.  The grid
// is split exactly at a = 0, where s has its |a| kink.
struct SDensityTable {
    int resolution = 0;
    std::vector<double> a;      // nodes, a[i] = -1 + 2i/resolution
    std::vector<double> s;      // s(a[i])
    std::vector<double> cdf;    // integral of s from -1 to a[i] (Simpson)
    std::vector<double> s_mid;  // s at interval midpoints (Simpson cache)

    static SDensityTable build(int resolution = 4096,
                               const SeriesControl& sc = s_series_defaults());
};

// S(a) = integral of s from -1 to a, computed from the table by integrating
// its per-interval quadratic (Simpson) interpolant; exact at the nodes.
double s_cdf(double a, const SDensityTable& table);

// Inverse of s_cdf by bisection on the monotone tabulated CDF, to |da| < 1e-8.
double s_quantile(double p, const SDensityTable& table);

// CSV export: header "a,s,cdf", one row per grid node, 17-significant-digit
// decimal floats.
void write_table_csv(const SDensityTable& table, std::ostream& out);

}  // namespace rangestat
