#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "diffar/series.hpp"

namespace diffar {

// A mean-change segmentation. Times are 1-based, each the last index of its
// regime, strictly increasing; segment_means has one entry per segment
// (times.size() + 1 of them). For PELT `objective` is the penalized optimum
// sum(SSE) + penalty * m; for WBS it is the SSE of the piecewise-constant fit.
struct Segmentation {
    std::vector<int> changepoint_times;
    std::vector<double> segment_means;
    double objective = 0.0;

    [[nodiscard]] std::size_t num_changepoints() const noexcept { return changepoint_times.size(); }
};

// CUSUM contrast on x[a..b] (0-based, inclusive) split after position t:
// sqrt(n1*n2/(n1+n2)) * (mean(x[t+1..b]) - mean(x[a..t])), n1 = t-a+1,
// n2 = b-t. Requires a <= t < b < x.size(). An upward step of size D at the
// split of two equal halves of length L scores D*sqrt(L/2).
[[nodiscard]] double cusum(std::span<const double> x, std::size_t a, std::size_t b, std::size_t t);

// Optimal-partitioning segmentation under squared-error segment cost with a
// per-changepoint penalty, solved by PELT. Pruning uses a relative slack of
// 1e-9 so the result equals the unpruned dynamic program exactly, including
// tie-breaks (first candidate wins). Requires N >= 2 and penalty > 0.
[[nodiscard]] Segmentation pelt_meanshift(const Series& s, double penalty);

// Penalty 2 * noise_var * log(n) used by the decorrelation pipeline; pass the
// innovation-variance estimate of the series being segmented.
[[nodiscard]] double pelt_default_penalty(double noise_var, std::size_t n);

// Robust noise scale: MAD of the lag-1 differences divided by
// (0.6745 * sqrt(2)), consistent for the innovation sd under a piecewise-
// constant mean with sparse shifts. Zero for a constant series.
[[nodiscard]] double robust_noise_sd(std::span<const double> x);

// Wild binary segmentation for mean changes: draws `num_intervals` random
// subintervals (the current segment itself is always an extra candidate),
// takes the maximal |CUSUM| split, accepts it when it strictly exceeds
// threshold_const * robust_noise_sd * sqrt(2*log N), and recurses. Fully
// deterministic given the seed: intervals are drawn once up-front and scanned
// in draw order, ties keep the first maximizer. Requires N >= 3,
// num_intervals >= 1, threshold_const > 0.
[[nodiscard]] Segmentation wbs_meanshift(const Series& s, std::size_t num_intervals, double threshold_const,
                                         std::uint64_t seed);

}  // namespace diffar
