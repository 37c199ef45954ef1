// Generates the committed OHLC fixtures:
//   <out_dir>/ohlc_clean.csv      - hourly FX-style bars whose intra-bar
//                                   extremes come from a finely discretized
//                                   Wiener path, so their s-stats follow the
//                                   theoretical law up to O(sqrt(dt)) bias
//   <out_dir>/ohlc_corrupted.csv  - the same bars with both wicks compressed
//                                   20% toward the body, the classic
//                                   signature of feeds that miss extremes
//
// Usage: make_fixtures <out_dir> [n_bars] [steps_per_bar] [seed]
//
// The files are deterministic in all arguments and committed to the
// repository; this tool only exists to regenerate or rescale them.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "rangestat/empirical_stats.hpp"
#include "rangestat/simulation.hpp"

namespace {

using namespace rangestat;

std::string timestamp(std::uint64_t hour_index) {
    using namespace std::chrono;
    const sys_days base = sys_days{year{2015} / 1 / 1};
    const auto tp = base + hours{hour_index};
    const sys_days day = floor<days>(tp);
    const year_month_day ymd{day};
    const long long hh = duration_cast<hours>(tp - day).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:00:00Z", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()), hh);
    return buf;
}

double round6(double x) { return std::round(x * 1e6) / 1e6; }

struct PriceBar {
    double open, high, low, close;
};

// Round to the printed precision, then restore the OHLC invariants that the
// rounding may have broken by a final ulp-level nudge.
PriceBar rounded(double open, double high, double low, double close) {
    PriceBar b;
    b.open = round6(open);
    b.close = round6(close);
    b.high = std::max({round6(high), b.open, b.close});
    b.low = std::min({round6(low), b.open, b.close});
    return b;
}

void write_bar(std::ofstream& out, const std::string& ts, const PriceBar& b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s,%.6f,%.6f,%.6f,%.6f\n", ts.c_str(), b.open, b.high,
                  b.low, b.close);
    out << buf;
}

int self_check(const std::filesystem::path& path) {
    std::ifstream in(path);
    const IngestResult r = ingest_ohlc_csv(in);
    std::cout << path.string() << ": " << r.bars.size() << " bars, " << r.rejects.size()
              << " rejects\n";
    return r.rejects.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2 || argc > 5) {
        std::cerr << "usage: make_fixtures <out_dir> [n_bars] [steps_per_bar] [seed]\n";
        return 2;
    }
    const std::filesystem::path out_dir = argv[1];
    const std::uint64_t n_bars = argc > 2 ? std::stoull(argv[2]) : 10000;
    const std::uint64_t steps = argc > 3 ? std::stoull(argv[3]) : 4096;
    const std::uint64_t seed = argc > 4 ? std::stoull(argv[4]) : 20150101;

    std::filesystem::create_directories(out_dir);

    EnsembleSpec spec;
    spec.path.process = ProcessKind::wiener;
    spec.path.mu = 0.0;
    spec.path.sigma = 1.0;
    spec.path.t = 1.0;
    spec.path.n_steps = steps;
    spec.path.seed = seed;
    spec.n_paths = n_bars;
    const std::vector<PathSummary> paths = simulate_ensemble(spec);

    const double bar_vol = 0.004;  // log-price volatility per bar, FX-like
    std::ofstream clean(out_dir / "ohlc_clean.csv");
    std::ofstream corrupted(out_dir / "ohlc_corrupted.csv");
    if (!clean || !corrupted) {
        std::cerr << "cannot open output files under " << out_dir << '\n';
        return 2;
    }
    clean << "timestamp,open,high,low,close\n";
    corrupted << "timestamp,open,high,low,close\n";

    double log_open = std::log(1.1);
    for (std::uint64_t i = 0; i < n_bars; ++i) {
        const PathSummary& p = paths[i];
        const double open = std::exp(log_open);
        const double high = std::exp(log_open + bar_vol * p.maximum);
        const double low = std::exp(log_open + bar_vol * p.minimum);
        const double close = std::exp(log_open + bar_vol * p.terminal);
        const std::string ts = timestamp(i);

        write_bar(clean, ts, rounded(open, high, low, close));

        const double body_high = std::max(open, close);
        const double body_low = std::min(open, close);
        const double high_c = high - 0.2 * (high - body_high);
        const double low_c = low + 0.2 * (body_low - low);
        write_bar(corrupted, ts, rounded(open, high_c, low_c, close));

        log_open += bar_vol * p.terminal;  // chain: next open = this close
    }
    clean.close();
    corrupted.close();

    return self_check(out_dir / "ohlc_clean.csv") + self_check(out_dir / "ohlc_corrupted.csv");
}
