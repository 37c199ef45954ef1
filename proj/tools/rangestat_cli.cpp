// rangestat: closed-form Brownian-extreme densities, the range-scaled
// terminal-value (s) distribution, a seeded Monte Carlo oracle, and
// KS/QQ-based structural tests for OHLC data.
//
// Exit codes: 0 success, 2 validation error (bad flags/parameters),
// 3 data error (unreadable or invalid input data).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rangestat/analytic_densities.hpp"
#include "rangestat/empirical_stats.hpp"
#include "rangestat/errors.hpp"
#include "rangestat/format.hpp"
#include "rangestat/s_density.hpp"
#include "rangestat/simulation.hpp"

namespace {

using namespace rangestat;

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path == "-") {
        fn(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path);
    if (!out) throw data_error("cannot open output file '" + path + "'");
    fn(out);
    if (!out) throw data_error("failed while writing '" + path + "'");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open input file '" + path + "'");
    return in;
}

// Reads a sample of real values from a CSV: either a single `s_stat` or
// `value` column, or the ensemble CSV emitted by `simulate` (the `s_stat`
// column is used).
std::vector<double> read_sample_csv(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw data_error("sample csv '" + path + "': empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();

    int column = -1;
    int n_fields = 1;
    if (line == "s_stat" || line == "value") {
        column = 0;
    } else {
        std::stringstream header(line);
        std::string name;
        std::vector<std::string> names;
        while (std::getline(header, name, ',')) names.push_back(name);
        for (std::size_t i = 0; i < names.size(); ++i)
            if (names[i] == "s_stat") column = static_cast<int>(i);
        n_fields = static_cast<int>(names.size());
        if (column < 0)
            throw data_error("sample csv '" + path +
                             "': header must be 'value', 's_stat', or contain an s_stat column");
    }

    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++row;
        std::string field = line;
        if (n_fields > 1) {
            std::size_t start = 0;
            for (int f = 0; f < column; ++f) {
                const std::size_t comma = line.find(',', start);
                if (comma == std::string::npos)
                    throw data_error("sample csv '" + path + "': malformed row " +
                                     std::to_string(row));
                start = comma + 1;
            }
            const std::size_t end = line.find(',', start);
            field = line.substr(start, end == std::string::npos ? end : end - start);
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(field, &used);
            if (used != field.size() || !std::isfinite(v)) throw std::invalid_argument(field);
            values.push_back(v);
        } catch (const std::exception&) {
            throw data_error("sample csv '" + path + "': cannot parse value in row " +
                             std::to_string(row));
        }
    }
    if (values.empty()) throw data_error("sample csv '" + path + "': no values");
    return values;
}

struct CliOptions {
    // density
    double t = 1.0, mu = 0.0, sigma = 1.0, x = 0.0;
    double r = 0.0, h = 0.0, l = 0.0;
    int nmax = 100;
    double tail_tol = 1e-12;
    // sdensity
    double a = 0.0;
    std::string form = "one";
    // table / reference distribution
    int resolution = 4096;
    std::string out = "-";
    // simulate
    std::string process = "wiener";
    std::uint64_t paths = 0, steps = 0, seed = 0;
    double rho = 1.0;
    unsigned threads = 1;
    // empirical
    std::string in_path, in_b, ref;
    int levels = 99;
};

int dispatch(CLI::App& app, const CliOptions& opt) {
    const SeriesControl gaussian_sc{opt.nmax, opt.tail_tol};

    if (auto* cmd = app.get_subcommand("density"); cmd->parsed()) {
        const bool has_r = cmd->count("--r") > 0;
        const bool has_hl = cmd->count("--h") > 0 || cmd->count("--l") > 0;
        if (has_r == has_hl)
            throw std::domain_error(
                "density: pass either --r (joint range/terminal density) or both --h and --l "
                "(trivariate density), not both");
        if (has_hl && (cmd->count("--h") == 0 || cmd->count("--l") == 0))
            throw std::domain_error("density: --h and --l must be given together");
        const ProcessParams params{opt.mu, opt.sigma, opt.t};
        const double value =
            has_r ? joint_range_terminal_density(params, opt.r, opt.x, gaussian_sc)
                  : trivariate_density(params, Barriers{opt.h, opt.l, opt.x}, gaussian_sc);
        std::cout << fmt17(value) << '\n';
        return 0;
    }

    if (auto* cmd = app.get_subcommand("sdensity"); cmd->parsed()) {
        const SeriesControl sc{opt.nmax, cmd->count("--tail-tol") ? opt.tail_tol : 1e-8};
        const double value =
            opt.form == "one" ? s_density_one_sided(opt.a, sc) : s_density_two_sided(opt.a, sc);
        std::cout << fmt17(value) << '\n';
        return 0;
    }

    if (auto* cmd = app.get_subcommand("table"); cmd->parsed()) {
        const SeriesControl sc{opt.nmax, cmd->count("--tail-tol") ? opt.tail_tol : 1e-8};
        const SDensityTable table = SDensityTable::build(opt.resolution, sc);
        with_output(opt.out, [&](std::ostream& os) { write_table_csv(table, os); });
        return 0;
    }

    if (auto* cmd = app.get_subcommand("simulate"); cmd->parsed()) {
        EnsembleSpec spec;
        spec.n_paths = opt.paths;
        spec.path.n_steps = opt.steps;
        spec.path.seed = opt.seed;
        if (opt.process == "wiener") {
            if (cmd->count("--rho"))
                throw std::domain_error("simulate: --rho applies only to --process ar1");
            spec.path.process = ProcessKind::wiener;
            spec.path.mu = opt.mu;
            spec.path.sigma = opt.sigma;
            spec.path.t = opt.t;
        } else {
            if (cmd->count("--mu") || cmd->count("--sigma") || cmd->count("--t"))
                throw std::domain_error(
                    "simulate: --mu/--sigma/--t apply only to --process wiener");
            spec.path.process = ProcessKind::ar1;
            spec.path.rho = opt.rho;
        }
        const std::vector<PathSummary> summaries = simulate_ensemble(spec, opt.threads);
        std::uint64_t degenerate = 0;
        with_output(opt.out,
                    [&](std::ostream& os) { degenerate = write_ensemble_csv(summaries, os); });
        if (degenerate > 0)
            std::cerr << "degenerate_paths_skipped=" << degenerate << '\n';
        return 0;
    }

    if (auto* cmd = app.get_subcommand("sstat"); cmd->parsed()) {
        (void)cmd;
        std::ifstream in = open_input(opt.in_path);
        const IngestResult ingest = ingest_ohlc_csv(in);
        const SDensityTable table = SDensityTable::build(opt.resolution);
        SampleReport rep = structural_quality_score(ingest.bars, table);
        rep.rejected_bars += ingest.rejects.size();
        for (const RowDiagnostic& diag : ingest.rejects)
            ++rep.reject_reasons[reject_reason_name(diag.reason)];
        with_output(opt.out, [&](std::ostream& os) { write_report_json(rep, os); });
        return 0;
    }

    if (auto* cmd = app.get_subcommand("kstest"); cmd->parsed()) {
        (void)cmd;
        if (opt.ref != "sdensity")
            throw std::domain_error("kstest: --ref must be 'sdensity'");
        const std::vector<double> sample = read_sample_csv(opt.in_path);
        const SDensityTable table = SDensityTable::build(opt.resolution);
        SampleReport rep = ks_test(sample, [&](double v) {
            return s_cdf(std::clamp(v, -1.0, 1.0), table);
        });
        rep.table_resolution = table.resolution;
        with_output(opt.out, [&](std::ostream& os) { write_report_json(rep, os); });
        return 0;
    }

    if (auto* cmd = app.get_subcommand("qq"); cmd->parsed()) {
        const bool has_b = cmd->count("--b") > 0;
        const bool has_ref = cmd->count("--ref") > 0;
        if (has_b == has_ref)
            throw std::domain_error("qq: pass exactly one of --b (two-sample) or --ref sdensity");
        if (has_ref && opt.ref != "sdensity")
            throw std::domain_error("qq: --ref must be 'sdensity'");
        const std::vector<double> sample_a = read_sample_csv(opt.in_path);
        std::vector<std::array<double, 2>> points;
        std::string header;
        if (has_ref) {
            const SDensityTable table = SDensityTable::build(opt.resolution);
            points = qq_points(
                sample_a, [&](double p) { return s_quantile(p, table); }, opt.levels);
            header = "theoretical_quantile,empirical_quantile";
        } else {
            std::vector<double> sorted_b = read_sample_csv(opt.in_b);
            std::sort(sorted_b.begin(), sorted_b.end());
            points = qq_points(
                sample_a, [&](double p) { return empirical_quantile_sorted(sorted_b, p); },
                opt.levels);
            // quantiles of --a on the horizontal axis, --b on the vertical
            for (auto& pt : points) std::swap(pt[0], pt[1]);
            header = "a_quantile,b_quantile";
        }
        with_output(opt.out, [&](std::ostream& os) {
            os << header << '\n';
            for (const auto& pt : points) os << fmt17(pt[0]) << ',' << fmt17(pt[1]) << '\n';
        });
        return 0;
    }

    throw std::domain_error("no subcommand given (see --help)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Brownian-extreme densities, the range-scaled terminal-value distribution, "
        "seeded Monte Carlo, and OHLC structural tests"};
    app.require_subcommand(0, 1);
    // Help is exposed as --help only: the short -h would collide with the
    // --h barrier option of the density subcommand.
    app.set_help_flag("--help", "Print this help message and exit");
    CliOptions opt;

    const auto add_subcommand = [&app](const std::string& name, const std::string& desc) {
        CLI::App* cmd = app.add_subcommand(name, desc);
        cmd->set_help_flag("--help", "Print this help message and exit");
        return cmd;
    };

    CLI::App* density = add_subcommand(
        "density", "Evaluate the joint range/terminal density (--r) or the trivariate "
                   "max/min/terminal density (--h --l)");
    density->add_option("--t", opt.t, "Horizon T")->required();
    density->add_option("--mu", opt.mu, "Drift per unit time")->required();
    density->add_option("--sigma", opt.sigma, "Volatility per sqrt(time)")->required();
    density->add_option("--x", opt.x, "Terminal value")->required();
    density->add_option("--r", opt.r, "Range (joint density mode)");
    density->add_option("--h", opt.h, "Upper barrier (trivariate mode)");
    density->add_option("--l", opt.l, "Lower barrier magnitude (trivariate mode)");
    density->add_option("--nmax", opt.nmax, "Series truncation index");
    density->add_option("--tail-tol", opt.tail_tol, "Series tail tolerance");

    CLI::App* sdensity =
        add_subcommand("sdensity", "Evaluate the range-scaled terminal-value density s(a)");
    sdensity->add_option("--a", opt.a, "Scaled value in [-1, 1]")->required();
    sdensity->add_option("--nmax", opt.nmax, "Series truncation index");
    sdensity->add_option("--tail-tol", opt.tail_tol, "Series tail tolerance");
    sdensity->add_option("--form", opt.form, "Series form")
        ->check(CLI::IsMember({"one", "two"}));

    CLI::App* table =
        add_subcommand("table", "Export the s-density table as CSV (a,s,cdf)");
    table->add_option("--resolution", opt.resolution, "Grid intervals (even, >= 2048)");
    table->add_option("--nmax", opt.nmax, "Series truncation index");
    table->add_option("--tail-tol", opt.tail_tol, "Series tail tolerance");
    table->add_option("--out", opt.out, "Output path ('-' = stdout)");

    CLI::App* simulate =
        add_subcommand("simulate", "Simulate a path ensemble and export it as CSV");
    simulate->add_option("--process", opt.process, "Process kind")
        ->required()
        ->check(CLI::IsMember({"wiener", "ar1"}));
    simulate->add_option("--paths", opt.paths, "Number of paths")->required();
    simulate->add_option("--steps", opt.steps, "Steps per path")->required();
    simulate->add_option("--seed", opt.seed, "RNG seed")->required();
    simulate->add_option("--mu", opt.mu, "Drift per unit time (wiener)");
    simulate->add_option("--sigma", opt.sigma, "Volatility per sqrt(time) (wiener)");
    simulate->add_option("--t", opt.t, "Horizon (wiener)");
    simulate->add_option("--rho", opt.rho, "AR(1) coefficient");
    simulate->add_option("--threads", opt.threads, "Worker threads (output is identical)");
    simulate->add_option("--out", opt.out, "Output path ('-' = stdout)");

    CLI::App* sstat = add_subcommand(
        "sstat", "Structural data-quality report for an OHLC CSV (KS + QQ vs theory)");
    sstat->add_option("--in", opt.in_path, "OHLC CSV (timestamp,open,high,low,close)")
        ->required();
    sstat->add_option("--resolution", opt.resolution, "Reference table resolution");
    sstat->add_option("--out", opt.out, "Output path ('-' = stdout)");

    CLI::App* kstest =
        add_subcommand("kstest", "KS goodness-of-fit of a sample against the s-density");
    kstest->add_option("--in", opt.in_path, "Sample CSV (value/s_stat column)")->required();
    kstest->add_option("--ref", opt.ref, "Reference distribution (only 'sdensity')")
        ->required();
    kstest->add_option("--resolution", opt.resolution, "Reference table resolution");
    kstest->add_option("--out", opt.out, "Output path ('-' = stdout)");

    CLI::App* qq = add_subcommand(
        "qq", "QQ point set: sample vs theory (--ref sdensity) or sample vs sample (--b)");
    qq->add_option("--a", opt.in_path, "Sample CSV")->required();
    qq->add_option("--b", opt.in_b, "Second sample CSV (two-sample mode)");
    qq->add_option("--ref", opt.ref, "Reference distribution (only 'sdensity')");
    qq->add_option("--levels", opt.levels, "Number of probability levels");
    qq->add_option("--resolution", opt.resolution, "Reference table resolution");
    qq->add_option("--out", opt.out, "Output path ('-' = stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exit 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the reason and usage hint to stderr
        return 2;
    }

    try {
        return dispatch(app, opt);
    } catch (const rangestat::data_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
