#include "diffar/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include <json.hpp>

#include "diffar/changepoint.hpp"
#include "diffar/decorrelate.hpp"
#include "diffar/errors.hpp"
#include "diffar/estimators.hpp"
#include "diffar/simulate.hpp"
#include "diffar/stats.hpp"
#include "diffar/version.hpp"
#include "parallel.hpp"

namespace diffar::experiments {

namespace {

using json = nlohmann::json;

// One estimator x metric column within a cell, with a preallocated slot per
// replication so parallel workers never contend.
struct Slot {
    std::string estimator;
    std::string metric;
    std::vector<std::optional<double>> values;
};

struct Block {
    std::string cell;
    std::vector<Slot> slots;
};

Slot make_slot(std::string estimator, std::string metric, std::size_t reps) {
    return Slot{std::move(estimator), std::move(metric), std::vector<std::optional<double>>(reps)};
}

std::string format_number(double v) {
    // Shortest round-trip decimal; cell labels must be byte-stable.
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

AggregateResult finalize(Design design, std::size_t reps, std::vector<Block> blocks) {
    AggregateResult out;
    out.design = design;
    for (const auto& block : blocks) {
        for (const auto& slot : block.slots) {
            std::vector<double> ok;
            ok.reserve(reps);
            for (std::size_t r = 0; r < slot.values.size(); ++r) {
                if (!slot.values[r]) continue;
                out.rows.push_back(RepRow{block.cell, slot.estimator, slot.metric, r, *slot.values[r]});
                ok.push_back(*slot.values[r]);
            }
            const std::size_t failed = reps - ok.size();
            if (failed * 20 > reps)
                throw Error("cell '" + block.cell + "' estimator '" + slot.estimator + "' failed " +
                            std::to_string(failed) + " of " + std::to_string(reps) + " replications (budget 5%)");

            SummaryRow row;
            row.cell = block.cell;
            row.estimator = slot.estimator;
            row.metric = slot.metric;
            row.reps_requested = reps;
            row.reps_ok = ok.size();
            row.reps_failed = failed;
            row.mean = stats::mean(ok);
            if (ok.size() >= 2) {
                row.var = stats::variance(ok);
                row.sd = std::sqrt(row.var);
            } else {
                row.var = std::numeric_limits<double>::quiet_NaN();
                row.sd = row.var;
            }
            double sq = 0.0;
            for (double v : ok) sq += v * v;
            row.rmse = std::sqrt(sq / static_cast<double>(ok.size()));
            const double levels[5] = {0.05, 0.25, 0.5, 0.75, 0.95};
            for (int q = 0; q < 5; ++q) row.quantiles[static_cast<std::size_t>(q)] = stats::quantile(ok, levels[q]);
            out.summary.push_back(std::move(row));
        }
    }
    return out;
}

std::uint64_t design_id(Design d) { return static_cast<std::uint64_t>(d); }

double run_and_time(AggregateResult& result, const std::chrono::steady_clock::time_point& start) {
    const auto stop = std::chrono::steady_clock::now();
    result.runtime_seconds = std::chrono::duration<double>(stop - start).count();
    return result.runtime_seconds;
}

// Innovation-variance scale for PELT on whatever series is being segmented:
// fit the order-1 difference estimator, take the variance of its one-step
// residuals.
double pelt_penalty_for(const Series& y) {
    const EstimationReport fit = diff_yule_walker(y, 1);
    const ResidualSeries resid = one_step_residuals(y, fit.coeffs);
    return pelt_default_penalty(stats::variance(resid.values), y.values.size());
}

}  // namespace

std::string design_name(Design d) {
    switch (d) {
        case Design::Ar1Compare: return "ar1_compare";
        case Design::Ar2Consistency: return "ar2_consistency";
        case Design::Ar4Consistency: return "ar4_consistency";
        case Design::ShiftSensitivity: return "shift_sensitivity";
        case Design::Table1: return "detector_table";
    }
    throw InvalidInputError("unknown design");
}

Design design_from_name(const std::string& name) {
    for (Design d : {Design::Ar1Compare, Design::Ar2Consistency, Design::Ar4Consistency, Design::ShiftSensitivity,
                     Design::Table1}) {
        if (design_name(d) == name) return d;
    }
    throw InvalidInputError("unknown design '" + name + "'");
}

ScenarioSpec with_defaults(ScenarioSpec spec) {
    if (spec.reps == 0) {
        switch (spec.design) {
            case Design::Ar1Compare:
            case Design::ShiftSensitivity: spec.reps = 500; break;
            case Design::Ar2Consistency:
            case Design::Ar4Consistency: spec.reps = 300; break;
            case Design::Table1: spec.reps = 200; break;
        }
    }
    if (spec.lengths.empty()) {
        switch (spec.design) {
            case Design::Ar1Compare:
            case Design::ShiftSensitivity: spec.lengths = {1000}; break;
            case Design::Ar2Consistency:
            case Design::Ar4Consistency: spec.lengths = {1000, 4000, 16000}; break;
            case Design::Table1: spec.lengths = {500}; break;
        }
    }
    return spec;
}

const SummaryRow* AggregateResult::find(const std::string& cell, const std::string& estimator,
                                        const std::string& metric) const {
    for (const auto& row : summary) {
        if (row.cell == cell && row.estimator == estimator && row.metric == metric) return &row;
    }
    return nullptr;
}

std::pair<double, double> draw_ar2_triangle(Rng& rng) {
    std::uniform_real_distribution<double> u2(-1.0, 1.0);
    const double phi2 = u2(rng);
    std::uniform_real_distribution<double> u1(phi2 - 1.0, 1.0 - phi2);
    const double phi1 = u1(rng);
    return {phi1, phi2};
}

std::array<double, 4> draw_ar4_coeffs(Rng& rng) {
    std::uniform_real_distribution<double> real_root(-0.9, 0.9);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double r1 = real_root(rng);
    const double r2 = real_root(rng);
    // Uniform on the radius-0.9 disk: density of the radius grows linearly.
    const double radius = 0.9 * std::sqrt(unit(rng));
    const double angle = 2.0 * std::acos(-1.0) * unit(rng);
    const std::complex<double> r3 = std::polar(radius, angle);
    const std::complex<double> roots[4] = {r1, r2, r3, std::conj(r3)};
    const std::vector<double> phi = coeffs_from_inverse_roots(roots);
    return {phi[0], phi[1], phi[2], phi[3]};
}

ChangepointConfig draw_random_config(std::size_t n, std::size_t m, double mean_min, double mean_max, Rng& rng) {
    if (n < 2 || m > n - 1) throw InvalidInputError("cannot place " + std::to_string(m) + " changepoints in {2.." +
                                                    std::to_string(n) + "}");
    std::uniform_int_distribution<int> pick(2, static_cast<int>(n));
    std::set<int> times;
    while (times.size() < m) times.insert(pick(rng));
    ChangepointConfig config;
    config.times.assign(times.begin(), times.end());
    std::uniform_real_distribution<double> level(mean_min, mean_max);
    config.means.resize(m + 1);
    for (auto& mu : config.means) mu = level(rng);
    return config;
}

ChangepointConfig equal_spaced_config(std::size_t n, std::size_t m, double delta) {
    if (m > 0 && n < 2 * (m + 1)) throw InvalidInputError("series too short for " + std::to_string(m) +
                                                          " equally spaced changepoints");
    ChangepointConfig config;
    for (std::size_t i = 1; i <= m; ++i) config.times.push_back(static_cast<int>(i * n / (m + 1)));
    config.means.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k) config.means[k] = (k % 2 == 1) ? delta : 0.0;
    return config;
}

ChangepointConfig random_alternating_config(std::size_t n, std::size_t m, double delta, Rng& rng) {
    ChangepointConfig config = draw_random_config(n, m, 0.0, 1.0, rng);
    for (std::size_t k = 0; k < config.means.size(); ++k) config.means[k] = (k % 2 == 1) ? delta : 0.0;
    return config;
}

AggregateResult run_ar1_compare(const ScenarioSpec& raw_spec) {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioSpec spec = with_defaults(raw_spec);
    const std::uint64_t did = design_id(Design::Ar1Compare);

    std::vector<Block> blocks;
    for (std::size_t iN = 0; iN < spec.lengths.size(); ++iN) {
        const std::size_t n = spec.lengths[iN];
        Block block;
        block.cell = "N=" + std::to_string(n);
        block.slots.push_back(make_slot("ar1seg", "phi_err", spec.reps));
        block.slots.push_back(make_slot("diff", "phi_err", spec.reps));
        for (std::size_t d : spec.window_divisors) {
            const std::string label = d == 1 ? "win=N" : "win=N/" + std::to_string(d);
            block.slots.push_back(make_slot(label, "phi_err", spec.reps));
        }
        blocks.push_back(std::move(block));

        Block& b = blocks.back();
        detail::parallel_for(spec.reps, spec.threads, [&](std::size_t r) {
            const std::uint64_t rep_seed = derive_seed(spec.seed, did, iN, r);
            Rng param_rng = make_rng(derive_seed(rep_seed, 1));
            std::uniform_real_distribution<double> phi_dist(spec.phi_min, spec.phi_max);
            const double phi = phi_dist(param_rng);
            std::uniform_int_distribution<std::size_t> m_dist(0, spec.max_changepoints);
            const std::size_t m = m_dist(param_rng);
            const ChangepointConfig config = draw_random_config(n, m, spec.mean_min, spec.mean_max, param_rng);

            const ARModel model{1, {phi}, 1.0};
            const Series x = apply_mean_shifts(simulate_ar(model, n, derive_seed(rep_seed, 0)), config);

            auto record = [&](std::size_t slot_idx, auto&& fit) {
                try {
                    b.slots[slot_idx].values[r] = fit() - phi;
                } catch (const Error&) {
                    b.slots[slot_idx].values[r] = std::nullopt;
                }
            };
            record(0, [&] { return ar1seg_estimate(x).coeffs[0]; });
            record(1, [&] { return diff_yule_walker(x, 1).coeffs[0]; });
            for (std::size_t di = 0; di < spec.window_divisors.size(); ++di) {
                const std::size_t w = n / spec.window_divisors[di];
                record(2 + di, [&] { return rolling_window_yw(x, 1, w).coeffs[0]; });
            }
        });
    }

    AggregateResult result = finalize(Design::Ar1Compare, spec.reps, std::move(blocks));
    run_and_time(result, start);
    return result;
}

namespace {

// Shared body of the AR(2)/AR(4) consistency designs: per replication draw a
// random causal model, contaminate with `num_changepoints` equally spaced
// alternating shifts, fit the difference estimator, record per-coefficient
// errors.
template <typename DrawModel>
AggregateResult run_consistency(Design design, const ScenarioSpec& spec, int order, DrawModel&& draw_model) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t did = design_id(design);

    std::vector<Block> blocks;
    for (std::size_t iN = 0; iN < spec.lengths.size(); ++iN) {
        const std::size_t n = spec.lengths[iN];
        Block block;
        block.cell = "N=" + std::to_string(n);
        for (int j = 1; j <= order; ++j)
            block.slots.push_back(make_slot("diff", "phi" + std::to_string(j) + "_err", spec.reps));
        blocks.push_back(std::move(block));

        const ChangepointConfig config = equal_spaced_config(n, spec.num_changepoints, spec.shift_magnitude);
        Block& b = blocks.back();
        detail::parallel_for(spec.reps, spec.threads, [&](std::size_t r) {
            const std::uint64_t rep_seed = derive_seed(spec.seed, did, iN, r);
            Rng param_rng = make_rng(derive_seed(rep_seed, 1));
            const std::vector<double> coeffs = draw_model(param_rng);
            const ARModel model{order, coeffs, 1.0};
            const Series x = apply_mean_shifts(simulate_ar(model, n, derive_seed(rep_seed, 0)), config);
            try {
                const EstimationReport fit = diff_yule_walker(x, order);
                for (int j = 0; j < order; ++j)
                    b.slots[static_cast<std::size_t>(j)].values[r] =
                        fit.coeffs[static_cast<std::size_t>(j)] - coeffs[static_cast<std::size_t>(j)];
            } catch (const Error&) {
            }
        });
    }

    AggregateResult result = finalize(design, spec.reps, std::move(blocks));
    run_and_time(result, start);
    return result;
}

}  // namespace

AggregateResult run_ar2_consistency(const ScenarioSpec& raw_spec) {
    const ScenarioSpec spec = with_defaults(raw_spec);
    return run_consistency(Design::Ar2Consistency, spec, 2, [](Rng& rng) {
        const auto [phi1, phi2] = draw_ar2_triangle(rng);
        return std::vector<double>{phi1, phi2};
    });
}

AggregateResult run_ar4_consistency(const ScenarioSpec& raw_spec) {
    const ScenarioSpec spec = with_defaults(raw_spec);
    return run_consistency(Design::Ar4Consistency, spec, 4, [](Rng& rng) {
        const auto phi = draw_ar4_coeffs(rng);
        return std::vector<double>(phi.begin(), phi.end());
    });
}

AggregateResult run_shift_sensitivity(const ScenarioSpec& raw_spec) {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioSpec spec = with_defaults(raw_spec);
    const std::uint64_t did = design_id(Design::ShiftSensitivity);
    const std::size_t n = spec.lengths.front();

    std::vector<Block> blocks;
    for (double size : spec.shift_sizes) {
        Block block;
        block.cell = "size=" + format_number(size);
        block.slots.push_back(make_slot("diff", "phi_err", spec.reps));
        blocks.push_back(std::move(block));
    }

    // Shift sizes share the base series and changepoint times within a
    // replication, so the size effect is measured paired.
    const ARModel model{1, {spec.phi}, 1.0};
    detail::parallel_for(spec.reps, spec.threads, [&](std::size_t r) {
        const std::uint64_t rep_seed = derive_seed(spec.seed, did, r);
        const Series base = simulate_ar(model, n, derive_seed(rep_seed, 0));
        Rng times_rng = make_rng(derive_seed(rep_seed, 1));
        const ChangepointConfig pattern = random_alternating_config(n, spec.num_changepoints, 1.0, times_rng);
        for (std::size_t cell = 0; cell < spec.shift_sizes.size(); ++cell) {
            ChangepointConfig config = pattern;
            for (std::size_t k = 0; k < config.means.size(); ++k) config.means[k] *= spec.shift_sizes[cell];
            try {
                const Series x = apply_mean_shifts(base, config);
                blocks[cell].slots[0].values[r] = diff_yule_walker(x, 1).coeffs[0] - spec.phi;
            } catch (const Error&) {
            }
        }
    });

    AggregateResult result = finalize(Design::ShiftSensitivity, spec.reps, std::move(blocks));
    run_and_time(result, start);
    return result;
}

AggregateResult run_table1(const ScenarioSpec& raw_spec) {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioSpec spec = with_defaults(raw_spec);
    const std::uint64_t did = design_id(Design::Table1);
    const std::size_t n = spec.lengths.front();
    const std::size_t counts[2] = {0, 3};

    std::vector<Block> blocks;
    struct CellDef {
        double phi;
        ChangepointConfig config;
    };
    std::vector<CellDef> cells;
    for (double phi : spec.table1_phis) {
        for (std::size_t m : counts) {
            const double delta = spec.snr * std::sqrt(1.0 / (1.0 - phi * phi));
            Block block;
            block.cell = "phi=" + format_number(phi) + ",m=" + std::to_string(m);
            for (const char* est : {"wbs_raw", "wbs_decorrelated", "pelt_raw", "pelt_decorrelated"})
                block.slots.push_back(make_slot(est, "num_changepoints", spec.reps));
            blocks.push_back(std::move(block));
            cells.push_back(CellDef{phi, equal_spaced_config(n, m, delta)});
        }
    }

    for (std::size_t cell = 0; cell < cells.size(); ++cell) {
        const ARModel model{1, {cells[cell].phi}, 1.0};
        Block& b = blocks[cell];
        detail::parallel_for(spec.reps, spec.threads, [&](std::size_t r) {
            const std::uint64_t rep_seed = derive_seed(spec.seed, did, cell, r);
            const Series x = apply_mean_shifts(simulate_ar(model, n, derive_seed(rep_seed, 0)), cells[cell].config);
            try {
                const EstimationReport fit = diff_yule_walker(x, 1);
                const ResidualSeries resid = one_step_residuals(x, fit.coeffs);
                const Series e{resid.values, static_cast<int>(resid.offset) + 1};

                b.slots[0].values[r] = static_cast<double>(
                    wbs_meanshift(x, spec.wbs_intervals, spec.wbs_threshold_const, derive_seed(rep_seed, 2))
                        .num_changepoints());
                b.slots[1].values[r] = static_cast<double>(
                    wbs_meanshift(e, spec.wbs_intervals, spec.wbs_threshold_const, derive_seed(rep_seed, 3))
                        .num_changepoints());
                b.slots[2].values[r] =
                    static_cast<double>(pelt_meanshift(x, pelt_penalty_for(x)).num_changepoints());
                b.slots[3].values[r] =
                    static_cast<double>(pelt_meanshift(e, pelt_penalty_for(e)).num_changepoints());
            } catch (const Error&) {
            }
        });
    }

    AggregateResult result = finalize(Design::Table1, spec.reps, std::move(blocks));
    run_and_time(result, start);
    return result;
}

AggregateResult run(const ScenarioSpec& spec) {
    switch (spec.design) {
        case Design::Ar1Compare: return run_ar1_compare(spec);
        case Design::Ar2Consistency: return run_ar2_consistency(spec);
        case Design::Ar4Consistency: return run_ar4_consistency(spec);
        case Design::ShiftSensitivity: return run_shift_sensitivity(spec);
        case Design::Table1: return run_table1(spec);
    }
    throw InvalidInputError("unknown design");
}

std::string scenario_to_json(const ScenarioSpec& spec) {
    json j;
    j["design"] = design_name(spec.design);
    j["reps"] = spec.reps;
    j["seed"] = spec.seed;
    j["lengths"] = spec.lengths;
    j["window_divisors"] = spec.window_divisors;
    j["phi_min"] = spec.phi_min;
    j["phi_max"] = spec.phi_max;
    j["max_changepoints"] = spec.max_changepoints;
    j["mean_min"] = spec.mean_min;
    j["mean_max"] = spec.mean_max;
    j["num_changepoints"] = spec.num_changepoints;
    j["shift_magnitude"] = spec.shift_magnitude;
    j["phi"] = spec.phi;
    j["shift_sizes"] = spec.shift_sizes;
    j["table1_phis"] = spec.table1_phis;
    j["snr"] = spec.snr;
    j["wbs_intervals"] = spec.wbs_intervals;
    j["wbs_threshold_const"] = spec.wbs_threshold_const;
    j["version"] = std::string(kVersion);
    return j.dump(2) + "\n";
}

ScenarioSpec scenario_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("scenario JSON must be an object");
    ScenarioSpec spec;
    try {
        if (!j.contains("design")) throw ParseError("scenario JSON needs a 'design' key");
        spec.design = design_from_name(j.at("design").get<std::string>());
        if (j.contains("reps")) spec.reps = j.at("reps").get<std::size_t>();
        if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("lengths")) spec.lengths = j.at("lengths").get<std::vector<std::size_t>>();
        if (j.contains("window_divisors"))
            spec.window_divisors = j.at("window_divisors").get<std::vector<std::size_t>>();
        if (j.contains("phi_min")) spec.phi_min = j.at("phi_min").get<double>();
        if (j.contains("phi_max")) spec.phi_max = j.at("phi_max").get<double>();
        if (j.contains("max_changepoints")) spec.max_changepoints = j.at("max_changepoints").get<std::size_t>();
        if (j.contains("mean_min")) spec.mean_min = j.at("mean_min").get<double>();
        if (j.contains("mean_max")) spec.mean_max = j.at("mean_max").get<double>();
        if (j.contains("num_changepoints")) spec.num_changepoints = j.at("num_changepoints").get<std::size_t>();
        if (j.contains("shift_magnitude")) spec.shift_magnitude = j.at("shift_magnitude").get<double>();
        if (j.contains("phi")) spec.phi = j.at("phi").get<double>();
        if (j.contains("shift_sizes")) spec.shift_sizes = j.at("shift_sizes").get<std::vector<double>>();
        if (j.contains("table1_phis")) spec.table1_phis = j.at("table1_phis").get<std::vector<double>>();
        if (j.contains("snr")) spec.snr = j.at("snr").get<double>();
        if (j.contains("wbs_intervals")) spec.wbs_intervals = j.at("wbs_intervals").get<std::size_t>();
        if (j.contains("wbs_threshold_const"))
            spec.wbs_threshold_const = j.at("wbs_threshold_const").get<double>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("scenario JSON: ") + e.what());
    }
    return spec;
}

}  // namespace diffar::experiments
