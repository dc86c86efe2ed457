// Command-line front end: estimate AR structure from a series file, simulate
// contaminated AR data, emit decorrelated residuals, and run the built-in
// simulation studies. All file outputs are byte-deterministic given the same
// arguments and seed; timing goes to stderr.

#include <cerrno>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "diffar/changepoint.hpp"
#include "diffar/decorrelate.hpp"
#include "diffar/errors.hpp"
#include "diffar/estimators.hpp"
#include "diffar/experiments.hpp"
#include "diffar/io.hpp"
#include "diffar/rng.hpp"
#include "diffar/series.hpp"
#include "diffar/simulate.hpp"
#include "diffar/version.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 2 parse errors, 3 validation errors, 4 numerical
// degeneracy, 1 everything else. CLI usage errors keep CLI11's own codes.
int classify(const diffar::Error& e) {
    if (dynamic_cast<const diffar::ParseError*>(&e)) return 2;
    if (dynamic_cast<const diffar::InvalidInputError*>(&e) != nullptr ||
        dynamic_cast<const diffar::InvalidModelError*>(&e) != nullptr ||
        dynamic_cast<const diffar::InvalidConfigError*>(&e) != nullptr)
        return 3;
    if (dynamic_cast<const diffar::DegenerateSeriesError*>(&e) != nullptr ||
        dynamic_cast<const diffar::NumericalDegeneracyError*>(&e) != nullptr ||
        dynamic_cast<const diffar::CannotBootstrapError*>(&e) != nullptr)
        return 4;
    return 1;
}

std::uint64_t seed_from_env_or_default() {
    const char* env = std::getenv("DIFFAR_SEED");
    if (env == nullptr || *env == '\0') return diffar::kDefaultSeed;
    errno = 0;
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (errno != 0 || end == env || *end != '\0')
        throw diffar::InvalidInputError("DIFFAR_SEED must be an unsigned integer, got '" + std::string(env) + "'");
    return static_cast<std::uint64_t>(value);
}

std::string join_doubles(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + diffar::io::format_double(values[i]);
    return out;
}

struct EstimateArgs {
    std::string input;
    std::optional<std::string> column;
    int p = 1;
    std::string method = "diff";
    bool all = false;
    std::optional<std::size_t> window;
    std::vector<int> changepoints;
    std::size_t bootstrap_reps = 0;
    std::optional<std::uint64_t> seed;
    std::string out_dir = ".";
};

struct SimulateArgs {
    std::size_t n = 0;
    std::vector<double> phi;
    double sigma2 = 1.0;
    std::vector<int> changepoints;
    std::vector<double> means;
    std::optional<std::size_t> burnin;
    std::optional<std::uint64_t> seed;
    std::string out = "series.txt";
};

struct ResidualArgs {
    std::string input;
    std::optional<std::string> column;
    int p = 1;
    std::string out = "residuals.txt";
};

struct ExperimentArgs {
    std::optional<std::string> design;
    std::optional<std::string> spec_path;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::optional<std::string> out_dir;
};

int run_estimate(const EstimateArgs& args) {
    const diffar::Series s = diffar::io::read_series(args.input, args.column);

    struct Entry {
        diffar::Method method;
        std::optional<diffar::EstimationReport> report;
        std::string error;
        std::exception_ptr error_ptr;
    };
    std::vector<Entry> entries;
    auto attempt = [&entries](diffar::Method m, auto&& fit) {
        Entry entry{m, std::nullopt, "", nullptr};
        try {
            entry.report = fit();
        } catch (const diffar::Error& e) {
            entry.error = e.what();
            entry.error_ptr = std::current_exception();
        }
        entries.push_back(std::move(entry));
    };

    const bool has_config = !args.changepoints.empty();
    if (args.all) {
        attempt(diffar::Method::ClassicalYW, [&] { return diffar::classical_yule_walker(s, args.p); });
        if (args.p == 1) attempt(diffar::Method::AR1seg, [&] { return diffar::ar1seg_estimate(s); });
        attempt(diffar::Method::DiffYW, [&] { return diffar::diff_yule_walker(s, args.p); });
        if (has_config)
            attempt(diffar::Method::SegmentedYW,
                    [&] { return diffar::segmented_yule_walker(s, args.p, args.changepoints); });
        if (args.window)
            attempt(diffar::Method::RollingWindow, [&] { return diffar::rolling_window_yw(s, args.p, *args.window); });
    } else {
        if (args.method == "diff") {
            attempt(diffar::Method::DiffYW, [&] { return diffar::diff_yule_walker(s, args.p); });
        } else if (args.method == "classical") {
            attempt(diffar::Method::ClassicalYW, [&] { return diffar::classical_yule_walker(s, args.p); });
        } else if (args.method == "ar1seg") {
            if (args.p != 1) throw diffar::InvalidInputError("method 'ar1seg' only fits order 1");
            attempt(diffar::Method::AR1seg, [&] { return diffar::ar1seg_estimate(s); });
        } else if (args.method == "segmented") {
            if (!has_config)
                throw diffar::InvalidInputError("method 'segmented' needs --changepoints t1,t2,...");
            attempt(diffar::Method::SegmentedYW,
                    [&] { return diffar::segmented_yule_walker(s, args.p, args.changepoints); });
        } else if (args.method == "rolling") {
            if (!args.window) throw diffar::InvalidInputError("method 'rolling' needs --window");
            attempt(diffar::Method::RollingWindow, [&] { return diffar::rolling_window_yw(s, args.p, *args.window); });
        } else {
            throw diffar::InvalidInputError("unknown method '" + args.method +
                                            "' (diff, classical, ar1seg, segmented, rolling)");
        }
        // A single requested method that failed is a hard failure; rethrow
        // the original exception so the exit code reflects its kind.
        if (!entries[0].report) std::rethrow_exception(entries[0].error_ptr);
    }

    if (args.bootstrap_reps > 0) {
        auto* diff_entry = [&entries]() -> Entry* {
            for (auto& e : entries)
                if (e.method == diffar::Method::DiffYW && e.report) return &e;
            return nullptr;
        }();
        if (diff_entry == nullptr)
            throw diffar::InvalidInputError("--bootstrap-reps applies to the 'diff' estimator, which produced no fit");
        const std::uint64_t seed = args.seed ? *args.seed : seed_from_env_or_default();
        diff_entry->report->bootstrap_se =
            diffar::bootstrap_se(s, args.p, args.bootstrap_reps, seed, /*threads=*/0);
    }

    // Human-readable summary on stdout.
    std::cout << "n=" << s.values.size() << " p=" << args.p << "\n";
    std::cout << "method\tcoeffs\tnoise_var\tcausal\tcondition\n";
    std::size_t succeeded = 0;
    for (const auto& entry : entries) {
        std::cout << diffar::method_name(entry.method) << "\t";
        if (entry.report) {
            ++succeeded;
            const auto& r = *entry.report;
            std::cout << join_doubles(r.coeffs) << "\t"
                      << (r.noise_var ? diffar::io::format_double(*r.noise_var) : "-") << "\t"
                      << (r.causal_fit ? "yes" : "no") << "\t"
                      << (r.condition_number ? diffar::io::format_double(*r.condition_number) : "-");
            if (!r.bootstrap_se.empty()) std::cout << "\tse=" << join_doubles(r.bootstrap_se);
            std::cout << "\n";
        } else {
            std::cout << "error: " << entry.error << "\n";
        }
    }

    json doc;
    doc["input"] = args.input;
    doc["n"] = s.values.size();
    doc["order"] = args.p;
    doc["results"] = json::array();
    for (const auto& entry : entries) {
        if (entry.report) {
            doc["results"].push_back(json::parse(diffar::io::report_to_json(*entry.report)));
        } else {
            doc["results"].push_back(
                json{{"method", std::string(diffar::method_name(entry.method))}, {"error", entry.error}});
        }
    }
    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path report_path = std::filesystem::path(args.out_dir) / "estimate_report.json";
    std::ofstream out(report_path, std::ios::binary | std::ios::trunc);
    if (!out) throw diffar::Error("cannot write to '" + report_path.string() + "'");
    out << doc.dump(2) << "\n";
    std::cout << "wrote " << report_path.string() << "\n";

    if (succeeded == 0) throw diffar::DegenerateSeriesError("no estimator produced a fit");
    return 0;
}

int run_simulate(const SimulateArgs& args) {
    if (args.n < 2) throw diffar::InvalidInputError("--n must be at least 2");
    if (args.phi.empty()) throw diffar::InvalidInputError("--phi is required (comma-separated coefficients)");
    const diffar::ARModel model{static_cast<int>(args.phi.size()), args.phi, args.sigma2};
    diffar::validate_model(model);

    diffar::ChangepointConfig config;
    config.times = args.changepoints;
    if (args.means.empty()) {
        config.means.assign(args.changepoints.size() + 1, 0.0);
    } else {
        config.means = args.means;
    }
    diffar::validate_config(config, args.n);

    const std::uint64_t seed = args.seed ? *args.seed : seed_from_env_or_default();
    const std::size_t burnin = args.burnin ? *args.burnin : diffar::default_burnin(model);
    const diffar::Series x =
        diffar::apply_mean_shifts(diffar::simulate_ar(model, args.n, seed, burnin), config);

    std::vector<std::string> comments;
    comments.push_back("simulated AR(" + std::to_string(model.order) + ") series with piecewise-constant mean");
    comments.push_back("n " + std::to_string(args.n));
    comments.push_back("coeffs " + join_doubles(model.coeffs));
    comments.push_back("noise_var " + diffar::io::format_double(model.noise_var));
    comments.push_back("seed " + std::to_string(seed));
    comments.push_back("burnin " + std::to_string(burnin));
    if (!config.times.empty()) {
        std::string times;
        for (std::size_t i = 0; i < config.times.size(); ++i)
            times += (i ? "," : "") + std::to_string(config.times[i]);
        comments.push_back("changepoint_times " + times);
    }
    comments.push_back("segment_means " + join_doubles(config.means));
    diffar::io::write_series(args.out, x.values, comments);

    json truth;
    truth["model"] = {{"order", model.order}, {"coeffs", model.coeffs}, {"noise_var", model.noise_var}};
    truth["changepoints"] = {{"times", config.times}, {"means", config.means}};
    truth["n"] = args.n;
    truth["seed"] = seed;
    truth["burnin"] = burnin;
    const std::string truth_path = args.out + ".truth.json";
    std::ofstream out(truth_path, std::ios::binary | std::ios::trunc);
    if (!out) throw diffar::Error("cannot write to '" + truth_path + "'");
    out << truth.dump(2) << "\n";

    std::cout << "wrote " << args.out << " and " << truth_path << "\n";
    return 0;
}

int run_residuals(const ResidualArgs& args) {
    const diffar::Series s = diffar::io::read_series(args.input, args.column);
    const diffar::EstimationReport fit = diffar::diff_yule_walker(s, args.p);
    const diffar::ResidualSeries resid = diffar::one_step_residuals(s, fit.coeffs);

    std::vector<std::string> comments;
    comments.push_back("one-step-ahead prediction residuals");
    comments.push_back("source " + args.input);
    comments.push_back("n " + std::to_string(s.values.size()));
    comments.push_back("p " + std::to_string(args.p));
    comments.push_back("offset " + std::to_string(resid.offset));
    comments.push_back("coeffs " + join_doubles(fit.coeffs));
    comments.push_back("noise_var " + (fit.noise_var ? diffar::io::format_double(*fit.noise_var) : "-"));
    diffar::io::write_series(args.out, resid.values, comments);

    std::cout << "fit coeffs=" << join_doubles(fit.coeffs) << " causal=" << (fit.causal_fit ? "yes" : "no") << "\n";
    std::cout << "wrote " << args.out << " (" << resid.values.size() << " residuals, offset " << resid.offset
              << ")\n";
    return 0;
}

int run_experiment(const ExperimentArgs& args) {
    diffar::experiments::ScenarioSpec spec;
    bool spec_has_seed = false;
    if (args.spec_path) {
        std::ifstream in(*args.spec_path, std::ios::binary);
        if (!in) throw diffar::ParseError("cannot open '" + *args.spec_path + "'");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        const std::string text = buffer.str();
        spec = diffar::experiments::scenario_from_json(text);
        spec_has_seed = text.find("\"seed\"") != std::string::npos;
        if (args.design && diffar::experiments::design_from_name(*args.design) != spec.design)
            throw diffar::InvalidInputError("--design conflicts with the design in --spec");
    } else if (args.design) {
        spec.design = diffar::experiments::design_from_name(*args.design);
    } else {
        throw diffar::InvalidInputError("experiment needs --design or --spec");
    }
    if (args.reps) spec.reps = *args.reps;
    if (args.seed)
        spec.seed = *args.seed;
    else if (!spec_has_seed)
        spec.seed = seed_from_env_or_default();
    spec.threads = args.threads;

    spec = diffar::experiments::with_defaults(spec);
    const diffar::experiments::AggregateResult result = diffar::experiments::run(spec);

    const std::filesystem::path out_dir =
        args.out_dir ? std::filesystem::path(*args.out_dir)
                     : std::filesystem::path(diffar::experiments::design_name(spec.design));
    diffar::io::write_experiment_outputs(out_dir, result, spec);

    std::cout << "design=" << diffar::experiments::design_name(spec.design) << " reps=" << spec.reps << " cells:\n";
    for (const auto& row : result.summary)
        std::cout << row.cell << "\t" << row.estimator << "\t" << row.metric << "\tmean="
                  << diffar::io::format_double(row.mean) << "\tsd=" << diffar::io::format_double(row.sd) << "\n";
    std::cout << "wrote " << (out_dir / "replications.tsv").string() << ", " << (out_dir / "summary.tsv").string()
              << ", " << (out_dir / "manifest.json").string() << "\n";
    std::cerr << "runtime_seconds=" << result.runtime_seconds << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AR coefficient and innovation-variance estimation that is robust to mean shifts"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(diffar::kVersion));

    EstimateArgs est;
    auto* cmd_est = app.add_subcommand("estimate", "Fit AR models to a series file");
    cmd_est->add_option("--input", est.input, "series file (one value per line, or delimited columns)")->required();
    cmd_est->add_option("--column", est.column, "column name when the file has a header row");
    cmd_est->add_option("--p", est.p, "AR order");
    cmd_est->add_option("--method", est.method, "diff|classical|ar1seg|segmented|rolling");
    cmd_est->add_flag("--all", est.all, "run every applicable estimator");
    cmd_est->add_option("--window", est.window, "window length for the rolling estimator");
    cmd_est->add_option("--changepoints", est.changepoints, "known changepoint times for the segmented estimator")
        ->delimiter(',');
    cmd_est->add_option("--bootstrap-reps", est.bootstrap_reps, "parametric bootstrap replications for SEs");
    cmd_est->add_option("--seed", est.seed, "seed for the bootstrap");
    cmd_est->add_option("--out-dir", est.out_dir, "directory for estimate_report.json");

    SimulateArgs sim;
    auto* cmd_sim = app.add_subcommand("simulate", "Simulate an AR series with optional mean shifts");
    cmd_sim->add_option("--n", sim.n, "series length")->required();
    cmd_sim->add_option("--phi", sim.phi, "AR coefficients, comma separated")->required()->delimiter(',');
    cmd_sim->add_option("--sigma2", sim.sigma2, "innovation variance");
    cmd_sim->add_option("--changepoints", sim.changepoints, "changepoint times t1,t2,...")->delimiter(',');
    cmd_sim->add_option("--means", sim.means, "segment means m0,m1,... (times.size()+1 values)")->delimiter(',');
    cmd_sim->add_option("--burnin", sim.burnin, "warm-up steps to discard");
    cmd_sim->add_option("--seed", sim.seed, "simulation seed");
    cmd_sim->add_option("--out", sim.out, "output series file");

    ResidualArgs res;
    auto* cmd_res = app.add_subcommand("residuals", "Decorrelate a series into one-step residuals");
    cmd_res->add_option("--input", res.input, "series file")->required();
    cmd_res->add_option("--column", res.column, "column name when the file has a header row");
    cmd_res->add_option("--p", res.p, "AR order of the difference fit");
    cmd_res->add_option("--out", res.out, "output residual file");

    ExperimentArgs exp;
    auto* cmd_exp = app.add_subcommand("experiment", "Run a built-in simulation study");
    cmd_exp->add_option("--design", exp.design,
                        "ar1_compare|ar2_consistency|ar4_consistency|shift_sensitivity|detector_table");
    cmd_exp->add_option("--spec", exp.spec_path, "scenario JSON file (as written to manifest.json)");
    cmd_exp->add_option("--reps", exp.reps, "replications per cell");
    cmd_exp->add_option("--seed", exp.seed, "master seed");
    cmd_exp->add_option("--threads", exp.threads, "worker threads (0 = hardware)");
    cmd_exp->add_option("--out-dir", exp.out_dir, "output directory (default: the design name)");

    try {
        app.parse(argc, argv);
        if (cmd_est->parsed()) return run_estimate(est);
        if (cmd_sim->parsed()) return run_simulate(sim);
        if (cmd_res->parsed()) return run_residuals(res);
        if (cmd_exp->parsed()) return run_experiment(exp);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const diffar::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
