#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "diffar/rng.hpp"
#include "diffar/series.hpp"

namespace diffar::experiments {

// The five built-in simulation studies.
enum class Design {
    Ar1Compare,        // AR(1) under random contamination: Diff vs AR1seg vs rolling windows
    Ar2Consistency,    // random causal AR(2), 9 shifts, error vs N
    Ar4Consistency,    // random causal AR(4) via root draws, error vs N
    ShiftSensitivity,  // AR(1) bias/spread vs shift magnitude
    Table1,            // changepoint counts: WBS/PELT on raw vs decorrelated series
};

[[nodiscard]] std::string design_name(Design d);
[[nodiscard]] Design design_from_name(const std::string& name);

// Full description of a run. Every field that affects results is serialized
// into the manifest; `threads` is an execution detail and is not.
struct ScenarioSpec {
    Design design = Design::Ar1Compare;
    std::size_t reps = 0;  // 0 means the design's default
    std::uint64_t seed = kDefaultSeed;
    std::vector<std::size_t> lengths;  // empty means the design's default

    // Ar1Compare
    std::vector<std::size_t> window_divisors = {1, 2, 5, 10, 20, 50};
    double phi_min = -0.95;
    double phi_max = 0.95;
    std::size_t max_changepoints = 10;  // m ~ U{0..max}
    double mean_min = -1.5;
    double mean_max = 1.5;

    // Consistency and sensitivity designs
    std::size_t num_changepoints = 9;
    double shift_magnitude = 2.0;  // alternating +/- shift size
    double phi = 0.5;              // AR(1) coefficient for ShiftSensitivity
    std::vector<double> shift_sizes = {0, 1, 2, 3, 4, 5};

    // Table1
    std::vector<double> table1_phis = {0.25, 0.5, 0.75};
    double snr = 2.0;  // shift size in units of the process sd
    std::size_t wbs_intervals = 5000;
    double wbs_threshold_const = 1.3;

    unsigned threads = 0;  // 0 = hardware concurrency; not serialized
};

// Fills design-dependent defaults (reps, lengths) left at their zero values.
[[nodiscard]] ScenarioSpec with_defaults(ScenarioSpec spec);

// One recorded measurement: replication `rep` of estimator `estimator` in
// cell `cell` produced `value` for `metric`.
struct RepRow {
    std::string cell;
    std::string estimator;
    std::string metric;
    std::size_t rep = 0;
    double value = 0.0;
};

struct SummaryRow {
    std::string cell;
    std::string estimator;
    std::string metric;
    std::size_t reps_requested = 0;
    std::size_t reps_ok = 0;
    std::size_t reps_failed = 0;
    double mean = 0.0;
    double sd = 0.0;
    double var = 0.0;
    double rmse = 0.0;
    std::array<double, 5> quantiles{};  // 5%, 25%, 50%, 75%, 95%
};

struct AggregateResult {
    Design design = Design::Ar1Compare;
    std::vector<RepRow> rows;
    std::vector<SummaryRow> summary;
    double runtime_seconds = 0.0;  // reported on stderr only, never in files

    // First summary row matching the labels, or nullptr.
    [[nodiscard]] const SummaryRow* find(const std::string& cell, const std::string& estimator,
                                         const std::string& metric) const;
};

// Runs the scenario (defaults filled first). Deterministic given the spec's
// seed and independent of spec.threads; any cell failing more than 5% of its
// replications aborts with an Error.
[[nodiscard]] AggregateResult run(const ScenarioSpec& spec);

[[nodiscard]] AggregateResult run_ar1_compare(const ScenarioSpec& spec);
[[nodiscard]] AggregateResult run_ar2_consistency(const ScenarioSpec& spec);
[[nodiscard]] AggregateResult run_ar4_consistency(const ScenarioSpec& spec);
[[nodiscard]] AggregateResult run_shift_sensitivity(const ScenarioSpec& spec);
[[nodiscard]] AggregateResult run_table1(const ScenarioSpec& spec);

// Parameter draws, exposed so their supports can be tested directly.

// (phi1, phi2) uniform on the causal AR(2) triangle, drawn as
// phi2 ~ U(-1, 1), phi1 ~ U(phi2 - 1, 1 - phi2).
[[nodiscard]] std::pair<double, double> draw_ar2_triangle(Rng& rng);

// Causal AR(4) coefficients from two real inverse roots U(-0.9, 0.9) and a
// conjugate pair uniform on the radius-0.9 disk.
[[nodiscard]] std::array<double, 4> draw_ar4_coeffs(Rng& rng);

// m distinct changepoint times drawn uniformly from {2..n} without
// replacement, sorted, with i.i.d. U(mean_min, mean_max) regime means.
[[nodiscard]] ChangepointConfig draw_random_config(std::size_t n, std::size_t m, double mean_min, double mean_max,
                                                   Rng& rng);

// m equally spaced changepoints (times i*n/(m+1)) with regime means
// alternating 0, delta, 0, delta, ...
[[nodiscard]] ChangepointConfig equal_spaced_config(std::size_t n, std::size_t m, double delta);

// m random distinct times as in draw_random_config, means alternating
// 0, delta, 0, delta, ...
[[nodiscard]] ChangepointConfig random_alternating_config(std::size_t n, std::size_t m, double delta, Rng& rng);

// Scenario (de)serialization for manifests and --spec files; excludes
// `threads`. Round-trips exactly.
[[nodiscard]] std::string scenario_to_json(const ScenarioSpec& spec);
[[nodiscard]] ScenarioSpec scenario_from_json(const std::string& text);

}  // namespace diffar::experiments
