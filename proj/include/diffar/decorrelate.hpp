#pragma once

#include <span>

#include "diffar/series.hpp"

namespace diffar {

// One-step-ahead prediction residuals. values[is 0-based] holds
// e_t = x_t - sum_j coeffs[j-1] * x_{t-j} for t = offset+1 .. N (1-based), so
// values.size() == N - offset with offset == coeffs.size().
struct ResidualSeries {
    std::vector<double> values;
    std::size_t offset = 0;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

// Residuals of the truncated linear predictor with the given AR coefficients.
// Requires finite coefficients, 1 <= p < N.
[[nodiscard]] ResidualSeries one_step_residuals(const Series& s, std::span<const double> coeffs);

}  // namespace diffar
