#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace rangestat {

enum class ProcessKind { wiener, ar1 };

// One path to simulate.  For wiener: W_0 = 0, W_{k+1} = W_k + mu dt
// + sigma sqrt(dt) Z_k with dt = t / n_steps.  For ar1: W_0 = 0,
// W_{k+1} = rho W_k + eps_k with unit-variance innovations (mu/sigma/t
// unused).  sigma = 0 is admitted for wiener — the path degenerates to the
// deterministic drift line, which is useful as a fixture.
struct PathSpec {
    ProcessKind process = ProcessKind::wiener;
    double mu = 0.0;
    double sigma = 1.0;
    double t = 1.0;
    double rho = 1.0;
    std::uint64_t n_steps = 0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Terminal value and running extrema of one path; the extrema include the
// initial point 0, so minimum <= 0 <= maximum and minimum <= terminal <=
// maximum always hold.
struct PathSummary {
    double terminal = 0.0;
    double maximum = 0.0;
    double minimum = 0.0;
    double range = 0.0;
};

struct EnsembleSpec {
    PathSpec path;
    std::uint64_t n_paths = 0;

    void validate() const;
};

// Deterministic substream derivation: path i of an ensemble draws from an
// independent stream keyed by (seed, i), so results do not depend on how
// paths are scheduled across threads.  Exposed because tests pin it down.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

// Simulates one path (stream = substream_seed(spec.seed, 0), i.e. identical
// to path 0 of an ensemble with the same spec).
PathSummary simulate_path(const PathSpec& spec);

// s-stat of one path: terminal / range.  Throws data_error on a degenerate
// (zero-range, i.e. all-constant) path.
double s_stat(const PathSummary& summary);

// All paths of the ensemble, in path-index order.  n_threads only changes
// the wall time, never the output bytes.
std::vector<PathSummary> simulate_ensemble(const EnsembleSpec& spec, unsigned n_threads = 1);

// s-stats of an ensemble, in path-index order; degenerate paths are skipped
// and counted, never silently dropped.
struct SSample {
    std::vector<double> values;
    std::uint64_t degenerate_skipped = 0;
};
SSample sample_s_stats(const EnsembleSpec& spec, unsigned n_threads = 1);

// Normalized 2-D histogram of (range, terminal) over [0, r_hi] x [-x_hi,
// x_hi]; mass outside the window is reported, and window + out-of-window
// counts always sum to n_paths exactly.
struct JointHistogram {
    int r_bins = 0;
    int x_bins = 0;
    double r_hi = 0.0;
    double x_hi = 0.0;
    std::uint64_t n_paths = 0;
    std::vector<std::uint64_t> counts;  // row-major: [ir * x_bins + ix]
    std::uint64_t out_of_window = 0;

    double bin_mass(int ir, int ix) const {
        return static_cast<double>(counts[static_cast<std::size_t>(ir) * x_bins + ix]) /
               static_cast<double>(n_paths);
    }
    double out_of_window_mass() const {
        return static_cast<double>(out_of_window) / static_cast<double>(n_paths);
    }
};
JointHistogram mc_joint_histogram(const EnsembleSpec& spec, int r_bins, int x_bins, double r_hi,
                                  double x_hi, unsigned n_threads = 1);

// Ensemble CSV export: header `path_index,terminal,maximum,minimum,range,
// s_stat`; degenerate paths are omitted from the rows and tallied in the
// returned counter.
std::uint64_t write_ensemble_csv(const std::vector<PathSummary>& summaries, std::ostream& out);

// The discrete-path range underestimates the continuous range by about
// 2 * beta1 * sigma * sqrt(dt) on average; beta1 = -zeta(1/2)/sqrt(2*pi).
// Exposed so analytic-vs-MC comparisons can budget the bias explicitly.
inline constexpr double range_bias_beta1 = 0.5825971579390107;

}  // namespace rangestat
