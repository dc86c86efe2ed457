#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "diffar/acf.hpp"
#include "diffar/series.hpp"

namespace diffar {

enum class Method {
    DiffYW,         // moment system on first differences
    AR1seg,         // robust median-quotient AR(1) estimator
    RollingWindow,  // median of classical YW fits over sliding windows
    ClassicalYW,    // Yule-Walker on the raw series
    SegmentedYW,    // classical YW after per-segment centering
};

[[nodiscard]] std::string_view method_name(Method m);

// The p x p moment system M * phi = rhs built from the autocorrelations of
// the differenced series.
struct DiffYwSystem {
    Eigen::MatrixXd M;
    Eigen::VectorXd rhs;
};

// Builds the system from rho_d(0..p), rho_d[0] == 1. Row 1 carries the
// telescoped lag-1 equation: M(1,1) = 1/2, M(1,2) = -1/2, and
// M(1,j) = -(1/2 + sum_{l=1}^{j-2} rho_d(l)) for j >= 3, with right-hand side
// rho_d(1) + 1/2. Rows r = 2..p are the shifted recursions: M(r,1) =
// rho_d(r-1), M(r,c) = rho_d(|r-c|) for c >= 2, right-hand side rho_d(r).
[[nodiscard]] DiffYwSystem build_diff_yw_system(std::span<const double> rho_d, int p);

// Result of one estimator run. Not every field applies to every method;
// inapplicable optionals stay empty and counters stay zero.
struct EstimationReport {
    Method method = Method::DiffYW;
    int order = 0;
    std::vector<double> coeffs;
    std::optional<double> noise_var;  // present when the method defines one
    bool noise_var_valid = false;     // noise_var present, finite and > 0
    bool causal_fit = false;
    std::optional<double> condition_number;     // of the solved moment system
    std::optional<std::size_t> window_length;   // rolling-window runs only
    std::size_t windows_total = 0;
    std::size_t windows_skipped = 0;
    std::vector<double> bootstrap_se;  // empty unless bootstrap was requested
};

// Solves the difference moment system from given autocovariances
// gamma_d(0..p) (exact or estimated): rho_d = gamma_d/gamma_d(0), phi from
// M phi = rhs, and the innovation variance from the exact identity
// sigma2 = sum_{j=1}^p phi_j gamma_d(j-1) - gamma_d(1). Fed exact moments of
// a causal model it reproduces the model. Throws NumericalDegeneracyError
// when the system condition number exceeds 1e12.
[[nodiscard]] EstimationReport diff_yw_from_moments(std::span<const double> acvf_d, int p);

// The same estimator from data: difference, estimate gamma_d(0..p) with
// sample_diff_acf, then solve. A non-causal or non-positive-variance fit is
// reported through the flags, never repaired. Requires N >= p + 3.
[[nodiscard]] EstimationReport diff_yule_walker(const Series& s, int p);

// Classical Yule-Walker on the raw series: Toeplitz system in rho_hat(0..p-1)
// with sigma2 = gamma_hat(0) * (1 - sum_j phi_j rho_hat(j)). Requires
// N >= p + 2.
[[nodiscard]] EstimationReport classical_yule_walker(const Series& s, int p);

// Classical Yule-Walker after subtracting each segment's own mean (an oracle
// that knows the changepoint times). With no changepoints this reduces to
// classical_yule_walker. Every segment must be non-empty.
[[nodiscard]] EstimationReport segmented_yule_walker(const Series& s, int p, const ChangepointConfig& config);
[[nodiscard]] EstimationReport segmented_yule_walker(const Series& s, int p, std::span<const int> times);

// Robust AR(1) estimator from median absolute differences at lags 1 and 2:
// phi_hat = med(|x_{t+2} - x_t|)^2 / med(|x_{t+1} - x_t|)^2 - 1.
// Requires N >= 3; a zero lag-1 median throws DegenerateSeriesError. Defines
// no innovation variance.
[[nodiscard]] EstimationReport ar1seg_estimate(const Series& s);

// Coordinate-wise median of classical YW fits over all length-`window`
// sliding windows. Windows whose fit fails are skipped and counted; more than
// half skipped throws DegenerateSeriesError. Requires p + 2 <= window <= N.
[[nodiscard]] EstimationReport rolling_window_yw(const Series& s, int p, std::size_t window);

// Parametric bootstrap standard errors for diff_yule_walker: refit on `reps`
// simulations from the fitted model (same length as `s`), return the
// per-coefficient standard deviations. Deterministic given the seed and
// independent of `threads` (0 means hardware concurrency). Requires
// reps >= 2; throws CannotBootstrapError when the fit on `s` is non-causal or
// lacks a valid innovation variance.
[[nodiscard]] std::vector<double> bootstrap_se(const Series& s, int p, std::size_t reps, std::uint64_t seed,
                                               unsigned threads = 1);

}  // namespace diffar
