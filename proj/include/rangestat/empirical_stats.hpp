#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "rangestat/s_density.hpp"

namespace rangestat {

// One open/high/low/close observation.  Invariants: all prices positive and
// finite, high >= max(open, close), low <= min(open, close), high > low.
struct OhlcBar {
    std::string timestamp;  // ISO-8601 UTC, e.g. 2020-01-02T00:00:00Z
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
};

enum class RejectReason { NEGATIVE_PRICE, HIGH_BELOW_BODY, LOW_ABOVE_BODY, ZERO_RANGE, PARSE_ERROR };

const char* reject_reason_name(RejectReason reason);

struct RowDiagnostic {
    std::size_t row;  // 1-based data-row index (header excluded)
    RejectReason reason;
};

struct IngestResult {
    std::vector<OhlcBar> bars;          // accepted bars, input order preserved
    std::vector<RowDiagnostic> rejects; // rejected rows, input order preserved
};

// Streaming single-pass CSV ingestion.  Header must be exactly
// `timestamp,open,high,low,close`; a missing or unknown header is a format
// error (data_error).  Invariant-violating rows are rejected per row with a
// reason code, never failing the whole file.
IngestResult ingest_ohlc_csv(std::istream& in);

// Empirical s-stat of one bar: (ln close - ln open) / (ln high - ln low).
// Log returns, not arithmetic ones: market bars live in price space, unlike
// simulated paths which are already in level space.  Throws data_error when
// high == low.
double bar_s_stat(const OhlcBar& bar);

// Goodness-of-fit report.  qq_points pairs are (reference quantile,
// empirical quantile) at probability levels (j - 0.5) / levels.
struct SampleReport {
    std::size_t n = 0;
    double ks_stat = 0.0;
    double p_value = 1.0;
    std::vector<std::array<double, 2>> qq_points;
    std::uint64_t rejected_bars = 0;
    std::map<std::string, std::uint64_t> reject_reasons;
    bool asymptotic_p_valid = true;  // asymptotic p-value trusted for n >= 35
    int table_resolution = 0;        // resolution of the reference s-table, if any
    std::string quantile_convention = "type-7";
    std::string notes;
};

// One-sample Kolmogorov-Smirnov test against a monotone reference CDF:
//   D = max_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|)  over the sorted sample,
// p-value from the asymptotic Kolmogorov series 2 sum (-1)^{k-1}
// exp(-2 k^2 lambda^2) at lambda = sqrt(n) D, truncated when terms fall
// below 1e-12.  Requires n >= 8 (data_error below).
SampleReport ks_test(const std::vector<double>& sample,
                     const std::function<double(double)>& reference_cdf);

// Two-sample variant: D between the two empirical CDFs, lambda =
// sqrt(nm/(n+m)) D.  Requires n, m >= 8.
SampleReport ks_test_two_sample(const std::vector<double>& sample_a,
                                const std::vector<double>& sample_b);

// Type-7 empirical quantile (linear interpolation of order statistics) of a
// sorted sample at probability level p.
double empirical_quantile_sorted(const std::vector<double>& sorted, double p);

// QQ point set: (reference_quantile(p_j), empirical_quantile(p_j)) at
// p_j = (j - 0.5) / levels, j = 1..levels.
std::vector<std::array<double, 2>> qq_points(const std::vector<double>& sample,
                                             const std::function<double(double)>& reference_quantile,
                                             int levels);

// The end-to-end structural data-quality test: bar s-stats, KS against the
// theoretical s-distribution, QQ points at 99 levels.  Requires >= 8 usable
// bars (data_error below).
SampleReport structural_quality_score(const std::vector<OhlcBar>& bars,
                                      const SDensityTable& table);

// JSON serialization of a report: fixed field order, 17-significant-digit
// floats, newline-terminated.
void write_report_json(const SampleReport& report, std::ostream& out);

}  // namespace rangestat
