#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rangestat/analytic_densities.hpp"
#include "rangestat/format.hpp"
#include "rangestat/s_density.hpp"
#include "rangestat/simulation.hpp"

using namespace rangestat;
namespace fs = std::filesystem;

namespace {

const char* cli_path() { return RANGESTAT_CLI_PATH; }

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "rangestat_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path dir = scratch_dir();
    const fs::path out_file = dir / ("stdout_" + std::to_string(counter));
    const fs::path err_file = dir / ("stderr_" + std::to_string(counter));
    ++counter;
    const std::string cmd = "\"" + std::string(cli_path()) + "\" " + args + " > \"" +
                            out_file.string() + "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    if (status != -1 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

// extracts the numeric value following `"key": ` in the report JSON
double json_number(const std::string& json, const std::string& key) {
    const std::string needle = "\"" + key + "\": ";
    const std::size_t at = json.find(needle);
    REQUIRE(at != std::string::npos);
    return std::stod(json.substr(at + needle.size()));
}

struct Bar {
    double open, high, low, close;
};

Bar bar_from_s(double s, double log_range, double gamma, double log_open) {
    const double body = s * log_range;
    const double lo_log = std::min(0.0, body) - (1.0 - gamma) * (log_range - std::abs(body));
    Bar bar;
    bar.open = std::exp(log_open);
    bar.close = std::exp(log_open + body);
    bar.low = std::exp(log_open + lo_log);
    bar.high = std::exp(log_open + lo_log + log_range);
    return bar;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("density subcommand evaluates both modes") {
    const auto joint = run_cli("density --t 1 --mu 0 --sigma 1 --x 0.3 --r 1.5");
    CHECK(joint.code == 0);
    CHECK(joint.out ==
          fmt17(joint_range_terminal_density(ProcessParams::standard(), 1.5, 0.3)) + "\n");

    const auto triv = run_cli("density --t 1.5 --mu 0.1 --sigma 2 --x -0.4 --h 2 --l 1");
    CHECK(triv.code == 0);
    CHECK(triv.out == fmt17(trivariate_density(ProcessParams{0.1, 2.0, 1.5},
                                               Barriers{2.0, 1.0, -0.4})) +
                          "\n");
}

TEST_CASE("density mode flags are mutually exclusive") {
    CHECK(run_cli("density --t 1 --mu 0 --sigma 1 --x 0 --r 1 --h 1 --l 1").code == 2);
    CHECK(run_cli("density --t 1 --mu 0 --sigma 1 --x 0").code == 2);
    const auto missing_l = run_cli("density --t 1 --mu 0 --sigma 1 --x 0 --h 1");
    CHECK(missing_l.code == 2);
    CHECK(missing_l.err.find("validation error") != std::string::npos);
    // missing required flag is a parse error, also exit 2
    CHECK(run_cli("density --mu 0 --sigma 1 --x 0 --r 1").code == 2);
    // invalid parameter domain
    CHECK(run_cli("density --t 0 --mu 0 --sigma 1 --x 0 --r 1").code == 2);
}

TEST_CASE("sdensity subcommand") {
    const auto one = run_cli("sdensity --a 0.37");
    CHECK(one.code == 0);
    CHECK(one.out == fmt17(s_density_one_sided(0.37)) + "\n");

    const auto two = run_cli("sdensity --a -0.25 --form two");
    CHECK(two.code == 0);
    CHECK(two.out == fmt17(s_density_two_sided(-0.25)) + "\n");

    const auto tight = run_cli("sdensity --a 0.37 --nmax 200 --tail-tol 1e-10");
    CHECK(tight.code == 0);
    CHECK(tight.out == fmt17(s_density_one_sided(0.37, SeriesControl{200, 1e-10})) + "\n");

    CHECK(run_cli("sdensity --a 1.5").code == 2);
    CHECK(run_cli("sdensity --a 0.5 --form three").code == 2);
    CHECK(run_cli("sdensity").code == 2);
}

TEST_CASE("table subcommand writes the csv") {
    const fs::path out = scratch_dir() / "table.csv";
    fs::remove(out);
    const auto r = run_cli("table --resolution 2048 --out \"" + out.string() + "\"");
    CHECK(r.code == 0);
    const std::string text = slurp(out);
    CHECK(text.rfind("a,s,cdf\n-1,0,0\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 2050);
    // to stdout by default
    const auto piped = run_cli("table --resolution 2048");
    CHECK(piped.code == 0);
    CHECK(piped.out == text);
    // resolution is validated
    CHECK(run_cli("table --resolution 100").code == 2);
    CHECK(run_cli("table --resolution 2049").code == 2);
}

TEST_CASE("simulate matches the library and is invariant to threads") {
    EnsembleSpec spec;
    spec.path.process = ProcessKind::wiener;
    spec.path.mu = 0.1;
    spec.path.sigma = 0.9;
    spec.path.t = 2.0;
    spec.path.n_steps = 32;
    spec.path.seed = 11;
    spec.n_paths = 20;
    std::ostringstream expected;
    (void)write_ensemble_csv(simulate_ensemble(spec), expected);

    const std::string base =
        "simulate --process wiener --mu 0.1 --sigma 0.9 --t 2 --paths 20 --steps 32 --seed 11";
    const auto solo = run_cli(base);
    CHECK(solo.code == 0);
    CHECK(solo.out == expected.str());
    CHECK(solo.err.empty());
    const auto threaded = run_cli(base + " --threads 4");
    CHECK(threaded.out == solo.out);
    const auto again = run_cli(base);
    CHECK(again.out == solo.out);

    const auto ar1 = run_cli("simulate --process ar1 --rho 0.9 --paths 10 --steps 50 --seed 3");
    CHECK(ar1.code == 0);
    CHECK(ar1.out.rfind("path_index,terminal,maximum,minimum,range,s_stat\n", 0) == 0);
    CHECK(std::count(ar1.out.begin(), ar1.out.end(), '\n') == 11);
}

TEST_CASE("simulate rejects mismatched process flags") {
    CHECK(run_cli("simulate --process wiener --rho 0.5 --paths 2 --steps 8 --seed 1").code == 2);
    CHECK(run_cli("simulate --process ar1 --mu 0.1 --paths 2 --steps 8 --seed 1").code == 2);
    CHECK(run_cli("simulate --process ar1 --rho 1 --paths 2 --steps 200000 --seed 1").code == 2);
    CHECK(run_cli("simulate --process brownian --paths 2 --steps 8 --seed 1").code == 2);
    CHECK(run_cli("simulate --process wiener --paths 0 --steps 8 --seed 1").code == 2);
}

TEST_CASE("simulate reports degenerate paths on stderr") {
    const auto r =
        run_cli("simulate --process wiener --mu 0 --sigma 0 --t 1 --paths 3 --steps 8 --seed 1");
    CHECK(r.code == 0);
    CHECK(r.out == "path_index,terminal,maximum,minimum,range,s_stat\n");
    CHECK(r.err == "degenerate_paths_skipped=3\n");
}

TEST_CASE("sstat end to end") {
    const SDensityTable table = SDensityTable::build();
    std::ostringstream csv;
    csv << "timestamp,open,high,low,close\n";
    const int n = 64;
    for (int i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        const Bar bar = bar_from_s(s_quantile(u, table), 0.004, 0.5, 0.0);
        char ts[32];
        std::snprintf(ts, sizeof ts, "2020-01-%02dT%02d:00:00Z", i / 24 + 1, i % 24);
        csv << ts << ',' << fmt17(bar.open) << ',' << fmt17(bar.high) << ',' << fmt17(bar.low)
            << ',' << fmt17(bar.close) << '\n';
    }
    // two bad rows: one flat, one with a broken price
    csv << "2020-01-04T00:00:00Z,1,1,1,1\n";
    csv << "2020-01-04T01:00:00Z,1,oops,0.9,1\n";
    const fs::path in = scratch_dir() / "bars.csv";
    spit(in, csv.str());

    const auto r = run_cli("sstat --in \"" + in.string() + "\"");
    CHECK(r.code == 0);
    CHECK(json_number(r.out, "n") == 64);
    CHECK(json_number(r.out, "p_value") > 0.9);
    CHECK(json_number(r.out, "total") == 2);
    CHECK(r.out.find("\"ZERO_RANGE\": 1") != std::string::npos);
    CHECK(r.out.find("\"PARSE_ERROR\": 1") != std::string::npos);
    CHECK(r.out.find("\"quantile_convention\": \"type-7\"") != std::string::npos);
    CHECK(r.out.find("\"table_resolution\": 4096") != std::string::npos);

    // missing and malformed inputs are data errors
    const auto missing = run_cli("sstat --in \"" + (scratch_dir() / "nope.csv").string() + "\"");
    CHECK(missing.code == 3);
    CHECK(missing.err.find("data error") != std::string::npos);
    const fs::path bad = scratch_dir() / "bad.csv";
    spit(bad, "open,high,low,close\n1,2,0.5,1\n");
    CHECK(run_cli("sstat --in \"" + bad.string() + "\"").code == 3);
    // too few usable bars
    const fs::path tiny = scratch_dir() / "tiny.csv";
    spit(tiny,
         "timestamp,open,high,low,close\n"
         "2020-01-01T00:00:00Z,1.00,1.04,0.99,1.02\n");
    CHECK(run_cli("sstat --in \"" + tiny.string() + "\"").code == 3);
}

TEST_CASE("kstest consumes plain and ensemble csvs") {
    const SDensityTable table = SDensityTable::build();
    std::ostringstream sample;
    sample << "s_stat\n";
    const int n = 500;
    for (int i = 0; i < n; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
        sample << fmt17(s_quantile(u, table)) << '\n';
    }
    const fs::path in = scratch_dir() / "sample.csv";
    spit(in, sample.str());
    const auto r = run_cli("kstest --in \"" + in.string() + "\" --ref sdensity");
    CHECK(r.code == 0);
    CHECK(json_number(r.out, "n") == n);
    CHECK(json_number(r.out, "p_value") > 0.99);
    CHECK(json_number(r.out, "ks_stat") < 0.01);

    // the ensemble csv from `simulate` feeds straight in via its s_stat column
    const fs::path ens = scratch_dir() / "ens.csv";
    const auto sim = run_cli(
        "simulate --process wiener --mu 0 --sigma 1 --t 1 --paths 400 --steps 512 --seed 5 "
        "--out \"" +
        ens.string() + "\"");
    CHECK(sim.code == 0);
    const auto ks = run_cli("kstest --in \"" + ens.string() + "\" --ref sdensity");
    CHECK(ks.code == 0);
    CHECK(json_number(ks.out, "n") == 400);
    CHECK(json_number(ks.out, "p_value") > 0.001);

    CHECK(run_cli("kstest --in \"" + in.string() + "\" --ref gaussian").code == 2);
    CHECK(run_cli("kstest --in \"" + in.string() + "\"").code == 2);
    const fs::path seven = scratch_dir() / "seven.csv";
    spit(seven, "value\n0.1\n0.2\n0.3\n0.4\n0.5\n0.6\n0.7\n");
    CHECK(run_cli("kstest --in \"" + seven.string() + "\" --ref sdensity").code == 3);
    const fs::path malformed = scratch_dir() / "malformed.csv";
    spit(malformed, "value\n0.1\nzz\n");
    CHECK(run_cli("kstest --in \"" + malformed.string() + "\" --ref sdensity").code == 3);
    const fs::path wrong_header = scratch_dir() / "wrong_header.csv";
    spit(wrong_header, "terminal,maximum\n0.1,0.2\n");
    CHECK(run_cli("kstest --in \"" + wrong_header.string() + "\" --ref sdensity").code == 3);
}

TEST_CASE("qq reference mode sits on the diagonal for quantile-spaced input") {
    const SDensityTable table = SDensityTable::build();
    const int levels = 99;
    const int n = 2 * levels + 1;
    std::ostringstream sample;
    sample << "value\n";
    for (int i = 0; i < n; ++i)
        sample << fmt17(s_quantile(static_cast<double>(i) / (n - 1), table)) << '\n';
    const fs::path in = scratch_dir() / "qq_sample.csv";
    spit(in, sample.str());

    const auto r = run_cli("qq --a \"" + in.string() + "\" --ref sdensity");
    CHECK(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "theoretical_quantile,empirical_quantile");
    int rows = 0;
    while (std::getline(lines, line)) {
        const std::size_t comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        // diagonal up to the last-ulp rounding of the interpolation weight
        const double ref = std::stod(line.substr(0, comma));
        const double emp = std::stod(line.substr(comma + 1));
        CHECK(std::abs(ref - emp) <= 1e-14);
        ++rows;
    }
    CHECK(rows == levels);
}

TEST_CASE("qq two-sample mode and flag exclusivity") {
    std::ostringstream sample;
    sample << "value\n";
    for (int i = 0; i < 64; ++i) sample << fmt17(std::sin(static_cast<double>(i))) << '\n';
    const fs::path a = scratch_dir() / "qq_a.csv";
    spit(a, sample.str());

    const auto self = run_cli("qq --a \"" + a.string() + "\" --b \"" + a.string() + "\"");
    CHECK(self.code == 0);
    std::istringstream lines(self.out);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "a_quantile,b_quantile");
    int rows = 0;
    while (std::getline(lines, line)) {
        const std::size_t comma = line.find(',');
        CHECK(line.substr(0, comma) == line.substr(comma + 1));
        ++rows;
    }
    CHECK(rows == 99);
    // custom level count
    const auto deciles =
        run_cli("qq --a \"" + a.string() + "\" --b \"" + a.string() + "\" --levels 10");
    CHECK(deciles.code == 0);
    CHECK(std::count(deciles.out.begin(), deciles.out.end(), '\n') == 11);
    // exactly one of --b / --ref
    CHECK(run_cli("qq --a \"" + a.string() + "\"").code == 2);
    CHECK(run_cli("qq --a \"" + a.string() + "\" --b \"" + a.string() +
                  "\" --ref sdensity")
              .code == 2);
    CHECK(run_cli("qq --a \"" + a.string() + "\" --ref gaussian").code == 2);
}

TEST_CASE("top-level contract") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("density --bogus 1").code == 2);
    const auto help = run_cli("--help");
    CHECK(help.code == 0);
    CHECK(help.out.find("density") != std::string::npos);
    CHECK(help.out.find("simulate") != std::string::npos);
    const auto sub_help = run_cli("simulate --help");
    CHECK(sub_help.code == 0);
    CHECK(sub_help.out.find("--seed") != std::string::npos);
}

TEST_CASE("every emitting subcommand is byte-identical across repeated runs") {
    const std::vector<std::string> commands = {
        "density --t 1 --mu 0.2 --sigma 1.1 --x 0.4 --r 2",
        "density --t 2 --mu -0.1 --sigma 0.8 --x 0.1 --h 1.2 --l 0.9",
        "sdensity --a -0.63",
        "table --resolution 2048",
        "simulate --process wiener --mu 0 --sigma 1 --t 1 --paths 50 --steps 64 --seed 99",
        "simulate --process ar1 --rho 0.99 --paths 50 --steps 64 --seed 99",
    };
    for (const std::string& cmd : commands) {
        const auto first = run_cli(cmd);
        const auto second = run_cli(cmd);
        CHECK(first.code == 0);
        CHECK(second.code == 0);
        CHECK(first.out == second.out);
        CHECK_FALSE(first.out.empty());
    }
}

}  // TEST_SUITE
