#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "diffar/ar_model.hpp"
#include "diffar/rng.hpp"
#include "diffar/series.hpp"

namespace diffar {

// Linear map from raw autocorrelations to differenced autocorrelations:
// entries is k x (k+2), column c corresponds to rho(c) for lags 0..k+1, and
// row h (1-based) carries the stencil (-1, 2, -1) / (2*(1 - rho1)) at columns
// (h-1, h, h+1), so entries * (rho(0),...,rho(k+1))^T = (rho_d(1),...,
// rho_d(k))^T. Interior rows sum to zero, so constants are annihilated.
struct BMatrix {
    int k = 0;
    double rho1 = 0.0;
    Eigen::MatrixXd entries;
};

// Throws NumericalDegeneracyError when 1 - rho1 is not positive at unit
// scale (|rho1| >= 1).
[[nodiscard]] BMatrix build_B(double rho1, int k);

// sqrt(N) times the absolute difference of the uncentered lag-h diff
// autocovariances (divisor N, the original length) of two equal-length
// series. Applied to a clean series and its mean-shifted copy this is the
// exact contamination term of the differenced second moments: for a single
// shift of size Delta at diff position q it equals
// |Delta * (d_{q-h} + d_{q+h} + Delta*[h==0])| / sqrt(N)
// (in-range terms only), which vanishes as N grows for bounded shifts of
// bounded count. Requires equal lengths >= 2 and 0 <= h <= N-2.
[[nodiscard]] double changepoint_discrepancy(const Series& clean, const Series& shifted, int h);

// Draws a changepoint configuration for a length-n series (may be a no-op
// returning a single zero-mean regime).
using ConfigGenerator = std::function<ChangepointConfig(std::size_t n, Rng&)>;

struct CltOptions {
    std::vector<std::size_t> lengths;  // at least 2 values of N
    std::size_t reps = 500;            // >= 2 enforced; >= 200 for stable moments
    std::uint64_t seed = kDefaultSeed;
    double sd_ratio_lo = 0.75;  // acceptance band for max/min sd ratio
    double sd_ratio_hi = 1.33;
    double z_max = 4.0;  // |z| bound for skewness and kurtosis at largest N
    unsigned threads = 0;
};

// Monte Carlo check that sqrt(N)-scaled estimation errors stabilize: for each
// N, `reps` series are simulated (with generated mean shifts applied),
// refitted, and the spread and shape of sqrt(N)*(phi_hat - phi) and
// sqrt(N)*(rho_d_hat(h) - rho_d(h)) are summarized.
struct CltCheckReport {
    std::vector<std::size_t> lengths;
    std::size_t reps = 0;
    std::size_t failed_reps = 0;  // across all N

    // Indexed [iN][j] for coefficients, [iN][h-1] for diff autocorrelations.
    std::vector<std::vector<double>> coeff_scaled_sd;
    std::vector<std::vector<double>> coeff_scaled_bias;  // mean of sqrt(N)*(phi_hat-phi)
    std::vector<std::vector<double>> rho_scaled_sd;
    std::vector<std::vector<double>> rho_scaled_bias;

    // Per coefficient / per lag: max over N divided by min over N.
    std::vector<double> coeff_sd_ratio;
    std::vector<double> rho_sd_ratio;

    // Shape of the coefficient errors at the largest N.
    std::vector<double> skew_z;
    std::vector<double> kurt_z;
    std::vector<double> skew_p;
    std::vector<double> kurt_p;

    bool sd_ratio_pass = false;   // every ratio within [lo, hi]
    bool normality_pass = false;  // every |z| < z_max
};

// Runs the check for a causal model. `make_config` may be empty (no shifts).
// Deterministic given the options' seed; independent of thread count.
[[nodiscard]] CltCheckReport clt_scaling_check(const ARModel& model, const ConfigGenerator& make_config,
                                               const CltOptions& options);

}  // namespace diffar
