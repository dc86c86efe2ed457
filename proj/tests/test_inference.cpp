#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "diffar/ar_model.hpp"
#include "diffar/errors.hpp"
#include "diffar/inference.hpp"
#include "diffar/rng.hpp"
#include "diffar/series.hpp"
#include "diffar/simulate.hpp"

using namespace diffar;

namespace {

ChangepointConfig alternating_shifts(std::size_t n, std::size_t m, double delta) {
    ChangepointConfig config;
    config.means.push_back(0.0);
    for (std::size_t k = 1; k <= m; ++k) {
        config.times.push_back(static_cast<int>(k * n / (m + 1)));
        config.means.push_back((k % 2 == 1) ? delta : 0.0);
    }
    return config;
}

}  // namespace

TEST_CASE("correlation map rows carry the second-difference stencil") {
    const BMatrix B = build_B(0.0, 3);
    REQUIRE(B.entries.rows() == 3);
    REQUIRE(B.entries.cols() == 5);
    // At rho1 = 0 the normalizer 2*(1 - rho1) is 2, so the stencil is
    // (-0.5, 1, -0.5).
    CHECK(B.entries(0, 0) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(B.entries(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(B.entries(0, 2) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(B.entries(0, 3) == 0.0);
    CHECK(B.entries(1, 0) == 0.0);
    CHECK(B.entries(1, 1) == doctest::Approx(-0.5).epsilon(1e-15));
    CHECK(B.entries(1, 2) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(B.entries(1, 3) == doctest::Approx(-0.5).epsilon(1e-15));
    for (int r = 0; r < 3; ++r) CHECK(B.entries.row(r).sum() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("correlation map sends raw correlations to differenced ones") {
    const ARModel model{3, {0.4, 0.2, 0.1}, 1.0};
    const int k = 4;
    const TheoreticalMoments m = theoretical_acvf(model, k + 1);
    const BMatrix B = build_B(m.acf[1], k);

    Eigen::VectorXd rho(k + 2);
    for (int c = 0; c <= k + 1; ++c) rho(c) = m.acf[static_cast<std::size_t>(c)];
    const Eigen::VectorXd mapped = B.entries * rho;

    const std::vector<double> rho_d = theoretical_diff_acf(model, k);
    for (int h = 1; h <= k; ++h)
        CHECK(mapped(h - 1) == doctest::Approx(rho_d[static_cast<std::size_t>(h)]).epsilon(1e-12));
}

TEST_CASE("correlation map reproduces the order-1 closed form") {
    // For an AR(1) with coefficient 0.5, rho = (1, 0.5, 0.25) and
    // rho_d(1) = (phi - 1)/2 = -0.25.
    const BMatrix B = build_B(0.5, 1);
    Eigen::VectorXd rho(3);
    rho << 1.0, 0.5, 0.25;
    const Eigen::VectorXd mapped = B.entries * rho;
    CHECK(mapped(0) == doctest::Approx(-0.25).epsilon(1e-14));
}

TEST_CASE("correlation map rejects unit-root normalization") {
    CHECK_THROWS_AS((void)build_B(1.0, 2), NumericalDegeneracyError);
    CHECK_THROWS_AS((void)build_B(-1.0, 2), NumericalDegeneracyError);
    CHECK_THROWS_AS((void)build_B(0.5, 0), InvalidInputError);
}

TEST_CASE("discrepancy vanishes when nothing shifted") {
    const Series x = simulate_ar(ARModel{1, {0.5}, 1.0}, 500, std::uint64_t{14});
    for (int h = 0; h <= 2; ++h) CHECK(changepoint_discrepancy(x, x, h) == 0.0);
}

TEST_CASE("discrepancy matches the single-shift closed form") {
    Rng rng = make_rng(99);
    std::uniform_real_distribution<double> delta_dist(0.5, 4.0);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 200 + 17 * static_cast<std::size_t>(trial);
        const Series x = simulate_ar(ARModel{1, {0.4}, 1.0}, n, derive_seed(7, static_cast<std::uint64_t>(trial)));
        const int tau = static_cast<int>(20 + rng() % (n - 40));
        const double delta = delta_dist(rng);
        const Series y = apply_mean_shifts(x, ChangepointConfig{{tau}, {0.0, delta}});

        const std::vector<double> d = difference(x).values;
        const std::size_t q = static_cast<std::size_t>(tau) - 1;  // 0-based diff position of the shift
        for (int h = 0; h <= 3; ++h) {
            double term = (h == 0) ? delta : 0.0;
            const std::size_t hh = static_cast<std::size_t>(h);
            if (q >= hh) term += d[q - hh];
            if (q + hh < d.size()) term += d[q + hh];
            const double expected = std::abs(delta * term) / std::sqrt(static_cast<double>(n));
            CHECK(changepoint_discrepancy(x, y, h) == doctest::Approx(expected).epsilon(1e-9));
        }
    }
}

TEST_CASE("discrepancy decays for a fixed number of shifts") {
    // Average over random shift placements so the comparison reflects the
    // 1/sqrt(N) rate, not one draw's sign pattern.
    auto mean_disc = [](std::size_t n, int h) {
        const Series x = simulate_ar(ARModel{1, {0.5}, 1.0}, n, derive_seed(3, n));
        Rng rng = make_rng(derive_seed(4, n));
        std::uniform_int_distribution<int> pick(2, static_cast<int>(n) - 1);
        double acc = 0.0;
        const int reps = 40;
        for (int r = 0; r < reps; ++r) {
            std::set<int> times;
            while (times.size() < 4) times.insert(pick(rng));
            ChangepointConfig config;
            config.times.assign(times.begin(), times.end());
            config.means = {0.0, 2.0, 0.0, 2.0, 0.0};
            acc += changepoint_discrepancy(x, apply_mean_shifts(x, config), h);
        }
        return acc / reps;
    };
    CHECK(mean_disc(25600, 1) < 0.5 * mean_disc(400, 1));
    CHECK(mean_disc(25600, 0) < 0.5 * mean_disc(400, 0));
}

TEST_CASE("discrepancy grows when the number of shifts scales with N") {
    // One shift per 10 observations contributes a systematic squared-shift
    // term at lag 0, so the scaled discrepancy grows like sqrt(N) instead of
    // vanishing: roughly 0.4 * sqrt(N) for shifts of size 2.
    auto dense = [](std::size_t n) {
        const Series x = simulate_ar(ARModel{1, {0.5}, 1.0}, n, derive_seed(5, n));
        return changepoint_discrepancy(x, apply_mean_shifts(x, alternating_shifts(n, n / 10, 2.0)), 0);
    };
    const double small = dense(400);
    const double large = dense(25600);
    CHECK(large > 4.0 * small);
    CHECK(large > 20.0);
}

TEST_CASE("discrepancy validates lengths and lags") {
    const Series a{{1.0, 2.0, 3.0}};
    const Series b{{1.0, 2.0}};
    CHECK_THROWS_AS((void)changepoint_discrepancy(a, b, 0), InvalidInputError);
    CHECK_THROWS_AS((void)changepoint_discrepancy(a, a, 2), InvalidInputError);
    CHECK_THROWS_AS((void)changepoint_discrepancy(a, a, -1), InvalidInputError);
    CHECK_NOTHROW((void)changepoint_discrepancy(a, a, 1));
}

TEST_CASE("scaled-error check stabilizes for bounded contamination") {
    CltOptions options;
    options.lengths = {400, 1600};
    options.reps = 220;
    options.seed = 11;
    options.threads = 2;
    const ARModel model{1, {0.6}, 1.0};
    ConfigGenerator shifts = [](std::size_t n, Rng&) { return alternating_shifts(n, 3, 1.0); };
    const CltCheckReport report = clt_scaling_check(model, shifts, options);

    REQUIRE(report.lengths == options.lengths);
    REQUIRE(report.coeff_scaled_sd.size() == 2);
    REQUIRE(report.coeff_scaled_sd[0].size() == 1);
    REQUIRE(report.rho_scaled_sd[0].size() == 1);
    REQUIRE(report.coeff_sd_ratio.size() == 1);
    REQUIRE(report.skew_z.size() == 1);
    CHECK(report.failed_reps == 0);
    CHECK(report.sd_ratio_pass);
    CHECK(report.coeff_sd_ratio[0] >= 1.0);
    // Two-sided p-values live in (0, 1].
    CHECK(report.skew_p[0] > 0.0);
    CHECK(report.skew_p[0] <= 1.0);
}

TEST_CASE("scaled-error check is deterministic and thread-invariant") {
    CltOptions options;
    options.lengths = {200, 800};
    options.reps = 60;
    options.seed = 5;
    const ARModel model{1, {0.5}, 1.0};
    options.threads = 1;
    const CltCheckReport a = clt_scaling_check(model, {}, options);
    options.threads = 3;
    const CltCheckReport b = clt_scaling_check(model, {}, options);
    CHECK(a.coeff_scaled_sd == b.coeff_scaled_sd);
    CHECK(a.rho_scaled_sd == b.rho_scaled_sd);
    CHECK(a.coeff_scaled_bias == b.coeff_scaled_bias);
    CHECK(a.skew_z == b.skew_z);
    CHECK(a.failed_reps == b.failed_reps);
}

TEST_CASE("contamination growing with N defeats the scaled-error check") {
    // One shift per 10 observations keeps the estimator biased at every N,
    // so the scaled bias grows like sqrt(N) instead of stabilizing.
    CltOptions options;
    options.lengths = {400, 1600};
    options.reps = 150;
    options.seed = 21;
    options.threads = 2;
    const ARModel model{1, {0.6}, 1.0};
    ConfigGenerator dense = [](std::size_t n, Rng&) { return alternating_shifts(n, n / 10, 3.0); };
    const CltCheckReport report = clt_scaling_check(model, dense, options);

    const double bias_small = std::abs(report.coeff_scaled_bias[0][0]);
    const double bias_large = std::abs(report.coeff_scaled_bias[1][0]);
    CHECK(bias_large > 1.5 * bias_small);
    CHECK(bias_large > 4.0);
}

TEST_CASE("scaled-error check validates its options") {
    const ARModel model{1, {0.5}, 1.0};
    CltOptions options;
    options.lengths = {400};
    CHECK_THROWS_AS((void)clt_scaling_check(model, {}, options), InvalidInputError);
    options.lengths = {400, 800};
    options.reps = 1;
    CHECK_THROWS_AS((void)clt_scaling_check(model, {}, options), InvalidInputError);
    options.reps = 10;
    CHECK_NOTHROW((void)clt_scaling_check(model, {}, options));
    CHECK_THROWS_AS((void)clt_scaling_check(ARModel{1, {1.5}, 1.0}, {}, options), InvalidModelError);
}
