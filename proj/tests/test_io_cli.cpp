#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "diffar/errors.hpp"
#include "diffar/estimators.hpp"
#include "diffar/io.hpp"
#include "diffar/rng.hpp"
#include "diffar/series.hpp"
#include "diffar/simulate.hpp"

using namespace diffar;
using json = nlohmann::json;

namespace {

namespace fs = std::filesystem;

const fs::path kScratch = "cli_scratch";

// Runs the estimation tool through the shell; returns the exit code, with
// stdout/stderr captured into files under the scratch directory.
int run_cli(const std::string& args, const std::string& tag) {
    const std::string cmd = std::string("\"") + DIFFAR_CLI_PATH + "\" " + args + " > " +
                            (kScratch / (tag + ".out")).string() + " 2> " + (kScratch / (tag + ".err")).string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Same, with an environment assignment prefix.
int run_cli_env(const std::string& env, const std::string& args, const std::string& tag) {
    const std::string cmd = env + " \"" + DIFFAR_CLI_PATH + "\" " + args + " > " +
                            (kScratch / (tag + ".out")).string() + " 2> " + (kScratch / (tag + ".err")).string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Series parse_text(const std::string& text, std::optional<std::string> column = std::nullopt) {
    std::istringstream in(text);
    return io::read_series_stream(in, column, "test");
}

struct ScratchSetup {
    ScratchSetup() {
        fs::remove_all(kScratch);
        fs::create_directories(kScratch);
    }
};

// Created once before the first test case runs.
const ScratchSetup scratch_setup{};

}  // namespace

TEST_CASE("reading skips comments and blank lines and keeps order") {
    const Series s = parse_text("# header comment\n\n1.5\n# interior\n-2.25\n\n3\n");
    CHECK(s.values == std::vector<double>{1.5, -2.25, 3.0});
}

TEST_CASE("parse errors carry 1-based line numbers") {
    try {
        (void)parse_text("1.0\n2.0\noops\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("(line 3)") != std::string::npos);
        CHECK(std::string(e.what()).find("oops") != std::string::npos);
    }
    CHECK_THROWS_AS((void)parse_text("1.0\nnan\n"), ParseError);
}

TEST_CASE("multi-column rows need an explicit column selection") {
    try {
        (void)parse_text("1.0 2.0\n3.0 4.0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("--column") != std::string::npos);
    }
}

TEST_CASE("column selection by header name") {
    const std::string text = "time,value,flag\n1,10.5,0\n2,11.5,1\n3,-0.5,0\n";
    const Series s = parse_text(text, "value");
    CHECK(s.values == std::vector<double>{10.5, 11.5, -0.5});

    // Mixed delimiters resolve to the same tokens.
    const Series tabbed = parse_text("time\tvalue\n1\t4.5\n2\t5.5\n", "value");
    CHECK(tabbed.values == std::vector<double>{4.5, 5.5});

    try {
        (void)parse_text(text, "bogus");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("bogus") != std::string::npos);
        CHECK(std::string(e.what()).find("time") != std::string::npos);  // lists available columns
        CHECK(e.line() == 1);
    }

    CHECK_THROWS_AS((void)parse_text("a,b\n1,2\n3\n", "b"), ParseError);  // short row
}

TEST_CASE("too little data is a parse error") {
    CHECK_THROWS_AS((void)parse_text("# only comments\n"), ParseError);
    CHECK_THROWS_AS((void)parse_text("42\n"), ParseError);
}

TEST_CASE("doubles are written in shortest round-trip form") {
    CHECK(io::format_double(2.0) == "2");
    CHECK(io::format_double(0.5) == "0.5");
    CHECK(io::format_double(-0.25) == "-0.25");
    Rng rng = make_rng(15);
    std::normal_distribution<double> dist;
    for (int i = 0; i < 200; ++i) {
        const double v = dist(rng) * std::pow(10.0, static_cast<int>(rng() % 21) - 10);
        const std::string text = io::format_double(v);
        CHECK(std::stod(text) == v);
    }
}

TEST_CASE("series files round-trip exactly") {
    Rng rng = make_rng(27);
    std::normal_distribution<double> dist;
    std::vector<double> values(100);
    for (auto& v : values) v = dist(rng);
    const std::vector<std::string> comments{"meta one", "meta two"};
    const fs::path path = kScratch / "roundtrip.txt";
    io::write_series(path, values, comments);

    const std::string text = slurp(path);
    CHECK(text.find("# meta one\n") != std::string::npos);
    const Series back = io::read_series(path);
    CHECK(back.values == values);

    CHECK_THROWS_AS((void)io::read_series(kScratch / "no_such_file.txt"), ParseError);
}

TEST_CASE("estimation reports serialize every advertised field") {
    const Series x = simulate_ar(ARModel{1, {0.5}, 1.0}, 300, std::uint64_t{8});
    const json diff = json::parse(io::report_to_json(diff_yule_walker(x, 1)));
    CHECK(diff["method"] == "diff");
    CHECK(diff["order"] == 1);
    CHECK(diff["coeffs"].size() == 1);
    CHECK(diff["noise_var"].is_number());
    CHECK(diff["noise_var_valid"].is_boolean());
    CHECK(diff["causal_fit"].is_boolean());
    CHECK(diff["condition_number"].is_number());
    CHECK_FALSE(diff.contains("window_length"));
    CHECK_FALSE(diff.contains("bootstrap_se"));

    const json roll = json::parse(io::report_to_json(rolling_window_yw(x, 1, 60)));
    CHECK(roll["method"] == "rolling");
    CHECK(roll["window_length"] == 60);
    CHECK(roll["windows_total"] == 241);
    CHECK(roll["windows_skipped"] == 0);

    const json seg = json::parse(io::report_to_json(ar1seg_estimate(x)));
    CHECK(seg["method"] == "ar1seg");
    CHECK(seg["noise_var"].is_null());
    CHECK(seg["condition_number"].is_null());
}

TEST_CASE("tool reports its version") {
    CHECK(run_cli("--version", "version") == 0);
    CHECK(slurp(kScratch / "version.out").find("0.1.0") != std::string::npos);
}

TEST_CASE("simulate writes the series and a matching truth sidecar") {
    const std::string series = (kScratch / "series.txt").string();
    const int rc = run_cli("simulate --n 300 --phi 0.6 --sigma2 1 --changepoints 100,200 --means 0,2,4 --seed 31 --out " +
                               series,
                           "sim");
    REQUIRE(rc == 0);

    const Series x = io::read_series(series);
    CHECK(x.values.size() == 300);

    const json truth = json::parse(slurp(series + ".truth.json"));
    CHECK(truth["model"]["order"] == 1);
    CHECK(truth["model"]["coeffs"] == json::array({0.6}));
    CHECK(truth["changepoints"]["times"] == json::array({100, 200}));
    CHECK(truth["changepoints"]["means"] == json::array({0.0, 2.0, 4.0}));
    CHECK(truth["seed"] == 31);
    CHECK(truth["n"] == 300);

    // Same seed, same bytes; different seed, different bytes.
    const std::string again = (kScratch / "series_again.txt").string();
    REQUIRE(run_cli("simulate --n 300 --phi 0.6 --sigma2 1 --changepoints 100,200 --means 0,2,4 --seed 31 --out " +
                        again,
                    "sim2") == 0);
    CHECK(slurp(series) == slurp(again));
    const std::string other = (kScratch / "series_other.txt").string();
    REQUIRE(run_cli("simulate --n 300 --phi 0.6 --seed 32 --out " + other, "sim3") == 0);
    CHECK(slurp(series) != slurp(other));
}

TEST_CASE("the seed environment variable matches an explicit --seed") {
    const std::string a = (kScratch / "env_a.txt").string();
    const std::string b = (kScratch / "env_b.txt").string();
    REQUIRE(run_cli_env("DIFFAR_SEED=444", "simulate --n 50 --phi 0.4 --out " + a, "env1") == 0);
    REQUIRE(run_cli("simulate --n 50 --phi 0.4 --seed 444 --out " + b, "env2") == 0);
    CHECK(slurp(a) == slurp(b));
    // An unparsable seed is a validation error.
    CHECK(run_cli_env("DIFFAR_SEED=abc", "simulate --n 50 --phi 0.4 --out " + a, "env3") == 3);
}

TEST_CASE("estimate runs every applicable method and writes a stable report") {
    const std::string series = (kScratch / "series.txt").string();
    const std::string dir1 = (kScratch / "rep1").string();
    const std::string dir2 = (kScratch / "rep2").string();
    REQUIRE(run_cli("estimate --input " + series + " --all --p 1 --changepoints 100,200 --window 50 --out-dir " +
                        dir1,
                    "est1") == 0);

    const json doc = json::parse(slurp(fs::path(dir1) / "estimate_report.json"));
    CHECK(doc["input"] == series);
    CHECK(doc["n"] == 300);
    CHECK(doc["order"] == 1);
    REQUIRE(doc["results"].size() == 5);  // classical, ar1seg, diff, segmented, rolling
    std::vector<std::string> methods;
    for (const auto& r : doc["results"]) methods.push_back(r["method"].get<std::string>());
    CHECK(methods == std::vector<std::string>{"classical", "ar1seg", "diff", "segmented", "rolling"});
    for (const auto& r : doc["results"]) {
        REQUIRE(r.contains("coeffs"));
        const double est = r["coeffs"][0].get<double>();
        if (r["method"] == "diff") CHECK(std::abs(est - 0.6) < 0.2);
        CHECK(est > 0.0);   // every method lands in the right regime,
        CHECK(est < 1.0);   // even classical, which the shifts bias upward
    }

    // Byte-stable across reruns.
    REQUIRE(run_cli("estimate --input " + series + " --all --p 1 --changepoints 100,200 --window 50 --out-dir " +
                        dir2,
                    "est2") == 0);
    CHECK(slurp(fs::path(dir1) / "estimate_report.json") == slurp(fs::path(dir2) / "estimate_report.json"));

    // The stdout table lists one row per method.
    const std::string out = slurp(kScratch / "est1.out");
    CHECK(out.find("method\tcoeffs") != std::string::npos);
    CHECK(out.find("segmented\t") != std::string::npos);
}

TEST_CASE("estimate attaches bootstrap standard errors to the diff fit") {
    const std::string series = (kScratch / "series.txt").string();
    const std::string dir = (kScratch / "rep_boot").string();
    REQUIRE(run_cli("estimate --input " + series + " --method diff --bootstrap-reps 20 --seed 7 --out-dir " + dir,
                    "boot1") == 0);
    const json doc = json::parse(slurp(fs::path(dir) / "estimate_report.json"));
    REQUIRE(doc["results"].size() == 1);
    REQUIRE(doc["results"][0].contains("bootstrap_se"));
    const double se = doc["results"][0]["bootstrap_se"][0].get<double>();
    CHECK(se > 0.0);
    CHECK(se < 0.5);

    const std::string dir2 = (kScratch / "rep_boot2").string();
    REQUIRE(run_cli("estimate --input " + series + " --method diff --bootstrap-reps 20 --seed 7 --out-dir " + dir2,
                    "boot2") == 0);
    CHECK(slurp(fs::path(dir) / "estimate_report.json") == slurp(fs::path(dir2) / "estimate_report.json"));
}

TEST_CASE("residuals command writes a shorter decorrelated series") {
    const std::string series = (kScratch / "series.txt").string();
    const std::string out = (kScratch / "resid.txt").string();
    REQUIRE(run_cli("residuals --input " + series + " --p 1 --out " + out, "resid") == 0);
    const Series r = io::read_series(out);
    CHECK(r.values.size() == 299);
    const std::string text = slurp(out);
    CHECK(text.find("# offset 1\n") != std::string::npos);
    CHECK(text.find("# coeffs ") != std::string::npos);
}

TEST_CASE("exit codes distinguish parse, validation, and degeneracy failures") {
    // Unreadable input file: parse error.
    CHECK(run_cli("estimate --input " + (kScratch / "missing.txt").string(), "code2") == 2);

    // Non-causal model: validation error.
    CHECK(run_cli("simulate --n 100 --phi 1.0 --out " + (kScratch / "bad.txt").string(), "code3") == 3);

    // Constant series: degenerate data.
    {
        std::ofstream out(kScratch / "constant.txt");
        for (int i = 0; i < 50; ++i) out << "5.0\n";
    }
    CHECK(run_cli("estimate --input " + (kScratch / "constant.txt").string() + " --method diff", "code4") == 4);

    // Missing required pieces: validation errors.
    CHECK(run_cli("estimate --input " + (kScratch / "series.txt").string() + " --method rolling", "code3b") == 3);
    CHECK(run_cli("estimate --input " + (kScratch / "series.txt").string() + " --method ar1seg --p 2", "code3c") ==
          3);
    CHECK(run_cli("estimate --input " + (kScratch / "series.txt").string() + " --method bogus", "code3d") == 3);
    CHECK(run_cli("experiment --reps 3", "code3e") == 3);  // neither --design nor --spec
}

TEST_CASE("experiment writes deterministic outputs and re-ingests its own manifest") {
    const std::string dir1 = (kScratch / "exp1").string();
    const std::string dir2 = (kScratch / "exp2").string();
    REQUIRE(run_cli("experiment --design shift_sensitivity --reps 4 --seed 5 --threads 2 --out-dir " + dir1,
                    "exp1") == 0);
    for (const char* f : {"replications.tsv", "summary.tsv", "manifest.json"})
        CHECK(fs::exists(fs::path(dir1) / f));

    const json manifest = json::parse(slurp(fs::path(dir1) / "manifest.json"));
    CHECK(manifest["design"] == "shift_sensitivity");
    CHECK(manifest["reps"] == 4);
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["lengths"] == json::array({1000}));
    CHECK_FALSE(manifest.contains("threads"));

    // Re-running from the manifest reproduces every output byte.
    REQUIRE(run_cli("experiment --spec " + dir1 + "/manifest.json --out-dir " + dir2, "exp2") == 0);
    for (const char* f : {"replications.tsv", "summary.tsv", "manifest.json"})
        CHECK(slurp(fs::path(dir1) / f) == slurp(fs::path(dir2) / f));

    const std::string summary = slurp(fs::path(dir1) / "summary.tsv");
    CHECK(summary.find("cell\testimator\tmetric") != std::string::npos);
    CHECK(summary.find("size=0\tdiff\tphi_err") != std::string::npos);

    // Conflicting design and spec is a validation error.
    CHECK(run_cli("experiment --design detector_table --spec " + dir1 + "/manifest.json", "exp3") == 3);
}
