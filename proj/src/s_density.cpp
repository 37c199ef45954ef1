#include "rangestat/s_density.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "rangestat/format.hpp"

namespace rangestat {

namespace {

void check_scaled_value(double a) {
    if (!std::isfinite(a) || a < -1.0 || a > 1.0)
        throw std::domain_error("scaled value a must lie in [-1, 1]");
}

// Shared driver: accumulates ring(1..n_max) on top of a base value and
// applies the Richardson tail estimate when a tolerance below 1e-8 asks for
// it.  ring(n) must decay like n^-3 so that S_inf - S_N ~ A / N^2.
template <class RingFn>
double sum_rational_series(const SeriesControl& sc, double base, RingFn&& ring) {
    const bool extrapolate = sc.tail_tol < 1e-8 && sc.n_max >= 4;
    const int half = sc.n_max / 2;
    double sum = base;
    double sum_half = 0.0;
    for (int n = 1; n <= sc.n_max; ++n) {
        sum += ring(n);
        if (n == half) sum_half = sum;
    }
    if (!extrapolate) return sum;
    const double ratio = static_cast<double>(sc.n_max) / half;
    return sum + (sum - sum_half) / (ratio * ratio - 1.0);
}

// Combined one-sided term at index n (families that start at n = 1 and the
// n >= 2 family), used both by the evaluator and by the convergence report.
double one_sided_ring(double a, int n) {
    const double u = std::abs(a);
    const double dn = n;
    const double a2 = a * a;
    const double d1 = 4.0 * dn * dn - a2;
    double term = 16.0 * (1.0 - u) * dn * dn * dn * (4.0 * dn * dn + 3.0 * a2) / (d1 * d1 * d1) -
                  (8.0 * dn * dn * dn * (1.0 - u) + 2.0 * dn * a2) / (d1 * d1);
    if (n >= 2) {
        const double d2 = (2.0 * dn - u + 2.0) * (2.0 * dn + u - 2.0);
        term -= dn * (8.0 * (dn * dn - 1.0) * (1.0 - u) - 2.0 * a2) / (d2 * d2);
    }
    return term;
}

}  // namespace

double s_density_one_sided(double a, const SeriesControl& sc) {
    check_scaled_value(a);
    const double u = std::abs(a);
    const double base = 2.0 / ((4.0 - u) * (4.0 - u));
    return sum_rational_series(sc, base, [&](int n) { return one_sided_ring(a, n); });
}

double s_density_two_sided(double a, const SeriesControl& sc) {
    check_scaled_value(a);
    const double u = std::abs(a);
    // ring(m) = term(+m) + term(-m) of the published two-sided sum.  Written
    // with the Heaviside values substituted: H(-n) = 0, H(n) = 1 for n > 0
    // and vice versa for n < 0.  The m = 1 negative-side pieces carry
    // coefficient n(n+1) = 0 and are skipped explicitly: their denominators
    // ((-u + 2n + 2)^2 at n = -1) vanish when a = 0.
    auto ring = [&](int m) {
        const double dm = m;
        const double up = 2.0 * dm - u;   // (2H(-n)-1)|a| + 2|n| at n = +m
        const double un = 2.0 * dm + u;   // same at n = -m
        double term = 4.0 * dm * dm * (1.0 - u) * (1.0 / (up * up * up) + 1.0 / (un * un * un));
        // n = +m: +n(n+1)/(2n+2-u)^2 - n(n+1)/(2n+u)^2
        const double cp = dm * (dm + 1.0);
        const double ep = 2.0 * dm + 2.0 - u;
        const double fp = 2.0 * dm + u;
        term += cp * (1.0 / (ep * ep) - 1.0 / (fp * fp));
        // n = -m: -n(n+1)/(-u+2n+2)^2 + n(n+1)/(u+2n)^2, coefficient m(m-1)
        if (m >= 2) {
            const double cn = dm * (dm - 1.0);
            const double en = 2.0 * dm - 2.0 + u;  // |-u + 2n + 2| at n = -m
            const double fn = 2.0 * dm - u;        // |u + 2n| at n = -m
            term += cn * (1.0 / (fn * fn) - 1.0 / (en * en));
        }
        return term;
    };
    return sum_rational_series(sc, 0.0, ring);
}

double s_density_appendix(double a) {
    check_scaled_value(a);
    // Verbatim port of the published reference algorithm.
    double s = 0.0;
    double n = 1.0;
    s = s + (1 - std::abs(a)) * 16 * std::pow(n, 3) * (4 * std::pow(n, 2) + 3 * std::pow(a, 2)) /
                std::pow(4 * std::pow(n, 2) - std::pow(a, 2), 3);
    s = s + (8 * std::pow(n, 3) * std::abs(a) - 8 * std::pow(n, 3) - 2 * n * std::pow(a, 2)) /
                std::pow((2 * n + std::abs(a)) * (std::abs(a) - 2 * n), 2);
    s = s + 2 / std::pow(4 - std::abs(a), 2);
    for (int ni = 2; ni <= 100; ++ni) {
        n = ni;
        s = s + (1 - std::abs(a)) * 16 * std::pow(n, 3) *
                    (4 * std::pow(n, 2) + 3 * std::pow(a, 2)) /
                    std::pow(4 * std::pow(n, 2) - std::pow(a, 2), 3);
        s = s + (8 * std::pow(n, 3) * std::abs(a) - 8 * std::pow(n, 3) - 2 * n * std::pow(a, 2)) /
                    std::pow((2 * n + std::abs(a)) * (std::abs(a) - 2 * n), 2);
        s = s - n *
                    (-8 * (std::pow(n, 2) - 1) * std::abs(a) - 2 * std::pow(a, 2) +
                     8 * (std::pow(n, 2) - 1)) /
                    (std::pow(-std::abs(a) - 2 * n + 2, 2) * std::pow(-std::abs(a) + 2 * n + 2, 2));
    }
    return s;
}

ConvergenceReport convergence_bound_check(double a, int n_max) {
    check_scaled_value(a);
    if (n_max < 1) throw std::domain_error("convergence_bound_check: n_max must be >= 1");
    const double u = std::abs(a);
    const double a2 = a * a;

    const SeriesControl sc{n_max, 1e-8};  // plain truncation
    ConvergenceReport rep{};
    rep.s_partial_sum = s_density_one_sided(a, sc);
    rep.last_term_magnitude = std::abs(one_sided_ring(a, n_max));

    double dom = 2.0 / ((4.0 - u) * (4.0 - u)) + 1.0;
    for (int n = 2; n <= n_max; ++n) {
        const double dn = n;
        const double d = 4.0 * dn * dn - a2;
        dom += (80.0 * dn * dn * dn * (1.0 - u) * a2 - 2.0 * dn * a2 + 2.0 * a2) /
               (4.0 * dn * dn * d * d);
    }
    rep.dominating_partial_sum = dom;
    rep.bounded = rep.s_partial_sum <= rep.dominating_partial_sum + 1e-9;
    return rep;
}

SDensityTable SDensityTable::build(int resolution, const SeriesControl& sc) {
    if (resolution < 2048 || resolution % 2 != 0)
        throw std::domain_error("SDensityTable: resolution must be even and >= 2048");
    SDensityTable tab;
    tab.resolution = resolution;
    tab.a.resize(resolution + 1);
    tab.s.resize(resolution + 1);
    tab.s_mid.resize(resolution);
    tab.cdf.resize(resolution + 1);
    for (int i = 0; i <= resolution; ++i) {
        // Exact symmetric grid: hits -1, 0, +1 without accumulation error.
        tab.a[i] = static_cast<double>(2 * i - resolution) / resolution;
        tab.s[i] = s_density_one_sided(tab.a[i], sc);
    }
    const double h = 2.0 / resolution;
    tab.cdf[0] = 0.0;
    for (int i = 0; i < resolution; ++i) {
        const double mid = tab.a[i] + 0.5 * h;
        tab.s_mid[i] = s_density_one_sided(mid, sc);
        tab.cdf[i + 1] =
            tab.cdf[i] + h / 6.0 * (tab.s[i] + 4.0 * tab.s_mid[i] + tab.s[i + 1]);
    }
    return tab;
}

double s_cdf(double a, const SDensityTable& table) {
    check_scaled_value(a);
    if (table.resolution < 2048)
        throw std::domain_error("s_cdf: table resolution must be >= 2048");
    if (a <= -1.0) return 0.0;
    if (a >= 1.0) return table.cdf.back();
    const double h = 2.0 / table.resolution;
    auto it = std::upper_bound(table.a.begin(), table.a.end(), a);
    int i = static_cast<int>(it - table.a.begin()) - 1;
    i = std::clamp(i, 0, table.resolution - 1);
    // Integrate the quadratic through (a_i, mid, a_{i+1}) from a_i to a; at
    // w = h this reproduces the Simpson increment exactly, so s_cdf is
    // continuous and matches table.cdf at every node.
    const double w = a - table.a[i];
    const double s0 = table.s[i], sm = table.s_mid[i], s1 = table.s[i + 1];
    const double w2 = w * w, w3 = w2 * w, h2 = h * h;
    const double i0 = 2.0 / h2 * (w3 / 3.0 - 0.75 * h * w2 + 0.5 * h2 * w);
    const double i1 = -4.0 / h2 * (w3 / 3.0 - 0.5 * h * w2);
    const double i2 = 2.0 / h2 * (w3 / 3.0 - 0.25 * h * w2);
    return table.cdf[i] + s0 * i0 + sm * i1 + s1 * i2;
}

double s_quantile(double p, const SDensityTable& table) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw std::domain_error("s_quantile: p must lie in [0, 1]");
    double lo = -1.0, hi = 1.0;
    // 40 halvings of [-1,1] leave an interval well below the 1e-8 target.
    for (int iter = 0; iter < 40; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (s_cdf(mid, table) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

void write_table_csv(const SDensityTable& table, std::ostream& out) {
    out << "a,s,cdf\n";
    for (int i = 0; i <= table.resolution; ++i)
        out << fmt17(table.a[i]) << ',' << fmt17(table.s[i]) << ',' << fmt17(table.cdf[i])
            << '\n';
}

}  // namespace rangestat
