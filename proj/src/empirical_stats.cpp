#include "rangestat/empirical_stats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include "rangestat/errors.hpp"
#include "rangestat/format.hpp"

namespace rangestat {

namespace {

bool parse_price(std::string_view field, double& out) {
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

// Shape check for ISO-8601 UTC instants: YYYY-MM-DDTHH:MM:SSZ with sane
// field ranges.  Calendar pedantry (leap years etc.) is out of scope — the
// timestamp is carried through, not computed with.
bool valid_timestamp(std::string_view ts) {
    if (ts.size() != 20) return false;
    static constexpr char shape[] = "dddd-dd-ddTdd:dd:ddZ";
    for (std::size_t i = 0; i < 20; ++i) {
        if (shape[i] == 'd') {
            if (!std::isdigit(static_cast<unsigned char>(ts[i]))) return false;
        } else if (ts[i] != shape[i]) {
            return false;
        }
    }
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (ts[i] - '0');
        return v;
    };
    const int month = num(5, 2), day = num(8, 2);
    const int hour = num(11, 2), minute = num(14, 2), second = num(17, 2);
    return month >= 1 && month <= 12 && day >= 1 && day <= 31 && hour <= 23 && minute <= 59 &&
           second <= 60;
}

double kolmogorov_p_value(double lambda) {
    if (lambda < 0.05) return 1.0;  // terms all ~1; the sup distance is ~0
    double p = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100000; ++k) {
        const double term = std::exp(-2.0 * static_cast<double>(k) * k * lambda * lambda);
        p += sign * term;
        if (term < 1e-12) break;
        sign = -sign;
    }
    return std::clamp(2.0 * p, 0.0, 1.0);
}

}  // namespace

const char* reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::NEGATIVE_PRICE: return "NEGATIVE_PRICE";
        case RejectReason::HIGH_BELOW_BODY: return "HIGH_BELOW_BODY";
        case RejectReason::LOW_ABOVE_BODY: return "LOW_ABOVE_BODY";
        case RejectReason::ZERO_RANGE: return "ZERO_RANGE";
        case RejectReason::PARSE_ERROR: return "PARSE_ERROR";
    }
    return "UNKNOWN";
}

IngestResult ingest_ohlc_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw data_error("ohlc csv: empty input, missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,open,high,low,close")
        throw data_error("ohlc csv: unknown header '" + line +
                         "' (expected 'timestamp,open,high,low,close')");

    IngestResult result;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;

        std::array<std::string_view, 5> fields;
        std::string_view rest = line;
        bool shape_ok = true;
        for (int f = 0; f < 5; ++f) {
            const std::size_t comma = rest.find(',');
            if (f < 4) {
                if (comma == std::string_view::npos) {
                    shape_ok = false;
                    break;
                }
                fields[f] = rest.substr(0, comma);
                rest = rest.substr(comma + 1);
            } else {
                shape_ok = comma == std::string_view::npos;
                fields[f] = rest;
            }
        }

        OhlcBar bar;
        if (!shape_ok || !valid_timestamp(fields[0]) || !parse_price(fields[1], bar.open) ||
            !parse_price(fields[2], bar.high) || !parse_price(fields[3], bar.low) ||
            !parse_price(fields[4], bar.close)) {
            result.rejects.push_back({row, RejectReason::PARSE_ERROR});
            continue;
        }
        bar.timestamp = fields[0];

        RejectReason reason{};
        bool ok = true;
        if (bar.open <= 0.0 || bar.high <= 0.0 || bar.low <= 0.0 || bar.close <= 0.0) {
            reason = RejectReason::NEGATIVE_PRICE;
            ok = false;
        } else if (bar.high < std::max(bar.open, bar.close)) {
            reason = RejectReason::HIGH_BELOW_BODY;
            ok = false;
        } else if (bar.low > std::min(bar.open, bar.close)) {
            reason = RejectReason::LOW_ABOVE_BODY;
            ok = false;
        } else if (bar.high == bar.low) {
            reason = RejectReason::ZERO_RANGE;
            ok = false;
        }
        if (ok)
            result.bars.push_back(std::move(bar));
        else
            result.rejects.push_back({row, reason});
    }
    return result;
}

double bar_s_stat(const OhlcBar& bar) {
    if (!(bar.high > bar.low))
        throw data_error("bar_s_stat: degenerate bar (high == low)");
    const double s =
        (std::log(bar.close) - std::log(bar.open)) / (std::log(bar.high) - std::log(bar.low));
    return std::clamp(s, -1.0, 1.0);
}

SampleReport ks_test(const std::vector<double>& sample,
                     const std::function<double(double)>& reference_cdf) {
    if (sample.size() < 8)
        throw data_error("ks_test: need at least 8 observations, got " +
                         std::to_string(sample.size()));
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = reference_cdf(sorted[i]);
        const double upper = std::abs(static_cast<double>(i + 1) / n - f);
        const double lower = std::abs(f - static_cast<double>(i) / n);
        d = std::max({d, upper, lower});
    }
    SampleReport rep;
    rep.n = sorted.size();
    rep.ks_stat = d;
    rep.p_value = kolmogorov_p_value(std::sqrt(n) * d);
    rep.asymptotic_p_valid = rep.n >= 35;
    return rep;
}

SampleReport ks_test_two_sample(const std::vector<double>& sample_a,
                                const std::vector<double>& sample_b) {
    if (sample_a.size() < 8 || sample_b.size() < 8)
        throw data_error("ks_test_two_sample: need at least 8 observations per sample");
    std::vector<double> a = sample_a, b = sample_b;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() && ib < b.size()) {
        // advance past every observation tied at the current value before
        // comparing, so ties never inflate the distance
        const double v = std::min(a[ia], b[ib]);
        while (ia < a.size() && a[ia] == v) ++ia;
        while (ib < b.size() && b[ib] == v) ++ib;
        d = std::max(d, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
    }
    SampleReport rep;
    rep.n = a.size() + b.size();
    rep.ks_stat = d;
    const double n_eff = na * nb / (na + nb);
    rep.p_value = kolmogorov_p_value(std::sqrt(n_eff) * d);
    rep.asymptotic_p_valid = a.size() >= 35 && b.size() >= 35;
    return rep;
}

double empirical_quantile_sorted(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) throw std::domain_error("empirical quantile of an empty sample");
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw std::domain_error("empirical quantile: p must lie in [0, 1]");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<std::array<double, 2>> qq_points(const std::vector<double>& sample,
                                             const std::function<double(double)>& reference_quantile,
                                             int levels) {
    if (sample.empty()) throw std::domain_error("qq_points: sample must be nonempty");
    if (levels < 2) throw std::domain_error("qq_points: levels must be >= 2");
    std::vector<double> sorted = sample;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::array<double, 2>> points;
    points.reserve(levels);
    for (int j = 1; j <= levels; ++j) {
        const double p = (static_cast<double>(j) - 0.5) / static_cast<double>(levels);
        points.push_back({reference_quantile(p), empirical_quantile_sorted(sorted, p)});
    }
    return points;
}

SampleReport structural_quality_score(const std::vector<OhlcBar>& bars,
                                      const SDensityTable& table) {
    std::vector<double> stats;
    stats.reserve(bars.size());
    std::uint64_t degenerate = 0;
    for (const OhlcBar& bar : bars) {
        if (!(bar.high > bar.low)) {
            ++degenerate;  // belt and braces: ingest already rejects these
            continue;
        }
        stats.push_back(bar_s_stat(bar));
    }
    if (stats.size() < 8)
        throw data_error("structural_quality_score: need at least 8 usable bars, got " +
                         std::to_string(stats.size()));
    SampleReport rep = ks_test(stats, [&](double v) { return s_cdf(v, table); });
    rep.qq_points = qq_points(stats, [&](double p) { return s_quantile(p, table); }, 99);
    rep.table_resolution = table.resolution;
    rep.rejected_bars = degenerate;
    if (degenerate > 0) rep.reject_reasons["ZERO_RANGE"] += degenerate;
    rep.notes =
        "s-stat = log-return of close over open divided by log high/low range; "
        "underestimated highs/lows shrink the denominator and push mass toward "
        "+-1, so defective extrema inflate the KS distance against theory";
    return rep;
}

void write_report_json(const SampleReport& report, std::ostream& out) {
    out << "{\n";
    out << "  \"n\": " << report.n << ",\n";
    out << "  \"ks_stat\": " << fmt17(report.ks_stat) << ",\n";
    out << "  \"p_value\": " << fmt17(report.p_value) << ",\n";
    out << "  \"rejected_bars\": {\n    \"total\": " << report.rejected_bars;
    for (const auto& [reason, count] : report.reject_reasons)
        out << ",\n    \"" << reason << "\": " << count;
    out << "\n  },\n";
    out << "  \"qq_points\": [";
    for (std::size_t i = 0; i < report.qq_points.size(); ++i) {
        out << (i == 0 ? "" : ",") << "\n    [" << fmt17(report.qq_points[i][0]) << ", "
            << fmt17(report.qq_points[i][1]) << "]";
    }
    out << (report.qq_points.empty() ? "" : "\n  ") << "],\n";
    out << "  \"metadata\": {\n";
    out << "    \"quantile_convention\": \"" << report.quantile_convention << "\",\n";
    out << "    \"table_resolution\": " << report.table_resolution << ",\n";
    out << "    \"asymptotic_p_valid\": " << (report.asymptotic_p_valid ? "true" : "false")
        << "\n  },\n";
    out << "  \"notes\": \"" << report.notes << "\"\n";
    out << "}\n";
}

}  // namespace rangestat
