#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffar/series.hpp"

namespace diffar {

// Sample second-moment estimates up to a maximum lag.
struct AcfEstimate {
    std::vector<double> acvf;  // gamma_hat(0..maxlag)
    std::vector<double> acf;   // rho_hat(0..maxlag); acf[0] == 1
    std::size_t n = 0;         // number of observations the estimate used

    [[nodiscard]] int maxlag() const noexcept { return static_cast<int>(acvf.size()) - 1; }
};

// Mean-subtracted autocovariances with the positive-semidefinite divisor n:
// gamma_hat(h) = n^-1 sum_{t=1}^{n-h} (x_t - xbar)(x_{t+h} - xbar).
// Requires n >= maxlag + 2; throws DegenerateSeriesError when gamma_hat(0)
// is zero at the scale of rounding (constant input).
[[nodiscard]] AcfEstimate sample_acf(std::span<const double> values, int maxlag);

// The same estimator applied to a differenced series: d is indexed 1..n with
// n = N - 1, the mean runs over all n differences.
[[nodiscard]] AcfEstimate sample_diff_acf(const DiffSeries& diffs, int maxlag);

}  // namespace diffar
