#include "diffar/changepoint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "diffar/errors.hpp"
#include "diffar/rng.hpp"
#include "diffar/stats.hpp"

namespace diffar {

namespace {

// Prefix sums with sum[0] = 0, sum[k] = x_0 + ... + x_{k-1}.
struct Prefix {
    std::vector<double> sum;
    std::vector<double> sq;

    explicit Prefix(std::span<const double> x) : sum(x.size() + 1, 0.0), sq(x.size() + 1, 0.0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            sum[i + 1] = sum[i] + x[i];
            sq[i + 1] = sq[i] + x[i] * x[i];
        }
    }

    // SSE about the mean of points a..b-1 (half-open).
    [[nodiscard]] double sse(std::size_t a, std::size_t b) const {
        const double s = sum[b] - sum[a];
        return (sq[b] - sq[a]) - s * s / static_cast<double>(b - a);
    }

    [[nodiscard]] double mean(std::size_t a, std::size_t b) const {
        return (sum[b] - sum[a]) / static_cast<double>(b - a);
    }
};

void require_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidInputError("series has a non-finite value");
    }
}

void fill_segment_means(Segmentation& seg, const Prefix& pre, std::size_t n) {
    seg.segment_means.clear();
    std::size_t start = 0;
    for (int t : seg.changepoint_times) {
        seg.segment_means.push_back(pre.mean(start, static_cast<std::size_t>(t)));
        start = static_cast<std::size_t>(t);
    }
    seg.segment_means.push_back(pre.mean(start, n));
}

double segmentation_sse(const Segmentation& seg, const Prefix& pre, std::size_t n) {
    double sse = 0.0;
    std::size_t start = 0;
    for (int t : seg.changepoint_times) {
        sse += pre.sse(start, static_cast<std::size_t>(t));
        start = static_cast<std::size_t>(t);
    }
    return sse + pre.sse(start, n);
}

}  // namespace

double cusum(std::span<const double> x, std::size_t a, std::size_t b, std::size_t t) {
    if (!(a <= t && t < b && b < x.size()))
        throw InvalidInputError("cusum needs a <= t < b < n, got a=" + std::to_string(a) + " t=" + std::to_string(t) +
                                " b=" + std::to_string(b) + " n=" + std::to_string(x.size()));
    const auto n1 = static_cast<double>(t - a + 1);
    const auto n2 = static_cast<double>(b - t);
    double left = 0.0, right = 0.0;
    for (std::size_t i = a; i <= t; ++i) left += x[i];
    for (std::size_t i = t + 1; i <= b; ++i) right += x[i];
    return std::sqrt(n1 * n2 / (n1 + n2)) * (right / n2 - left / n1);
}

double pelt_default_penalty(double noise_var, std::size_t n) {
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        throw InvalidInputError("penalty needs a positive finite noise variance");
    if (n < 2) throw InvalidInputError("penalty needs n >= 2");
    return 2.0 * noise_var * std::log(static_cast<double>(n));
}

Segmentation pelt_meanshift(const Series& s, double penalty) {
    const std::size_t n = s.values.size();
    if (n < 2) throw InvalidInputError("segmentation needs at least 2 observations");
    if (!(penalty > 0.0) || !std::isfinite(penalty)) throw InvalidInputError("penalty must be finite and > 0");
    require_finite(s.values);
    const Prefix pre{s.values};

    // F[t] = optimal penalized cost of points 1..t; F[0] = -penalty so that
    // each segment contributes cost + penalty and the total ends up
    // sum(SSE) + penalty * (#changepoints).
    std::vector<double> opt(n + 1, 0.0);
    std::vector<std::size_t> last(n + 1, 0);
    opt[0] = -penalty;
    std::vector<std::size_t> candidates{0};
    std::vector<std::size_t> surviving;
    for (std::size_t t = 1; t <= n; ++t) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_s = 0;
        for (std::size_t c : candidates) {
            const double v = opt[c] + pre.sse(c, t) + penalty;
            if (v < best) {
                best = v;
                best_s = c;
            }
        }
        opt[t] = best;
        last[t] = best_s;

        // Keep only split points that could still be optimal later; the
        // relative slack keeps pruning strictly conservative so the result
        // matches the unpruned dynamic program exactly.
        const double slack = 1e-9 * (1.0 + std::abs(best));
        surviving.clear();
        for (std::size_t c : candidates) {
            if (opt[c] + pre.sse(c, t) <= best + slack) surviving.push_back(c);
        }
        surviving.push_back(t);
        candidates.swap(surviving);
    }

    Segmentation seg;
    seg.objective = opt[n];
    for (std::size_t t = n; t > 0; t = last[t]) {
        if (last[t] > 0) seg.changepoint_times.push_back(static_cast<int>(last[t]));
    }
    std::reverse(seg.changepoint_times.begin(), seg.changepoint_times.end());
    fill_segment_means(seg, pre, n);
    return seg;
}

double robust_noise_sd(std::span<const double> x) {
    if (x.size() < 2) throw InvalidInputError("noise scale needs at least 2 observations");
    require_finite(x);
    std::vector<double> diffs(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) diffs[i] = x[i + 1] - x[i];
    return stats::mad(diffs) / (0.6745 * std::sqrt(2.0));
}

Segmentation wbs_meanshift(const Series& s, std::size_t num_intervals, double threshold_const, std::uint64_t seed) {
    const std::size_t n = s.values.size();
    if (n < 3) throw InvalidInputError("wild binary segmentation needs at least 3 observations");
    if (num_intervals < 1) throw InvalidInputError("need at least 1 random interval");
    if (!(threshold_const > 0.0)) throw InvalidInputError("threshold constant must be > 0");
    require_finite(s.values);

    const double sigma = robust_noise_sd(s.values);
    const double threshold = threshold_const * sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
    const Prefix pre{s.values};

    // |CUSUM| of x[a..b] split after t, from prefix sums.
    auto contrast = [&pre](std::size_t a, std::size_t b, std::size_t t) {
        const auto n1 = static_cast<double>(t - a + 1);
        const auto n2 = static_cast<double>(b - t);
        const double left = pre.sum[t + 1] - pre.sum[a];
        const double right = pre.sum[b + 1] - pre.sum[t + 1];
        return std::abs(std::sqrt(n1 * n2 / (n1 + n2)) * (right / n2 - left / n1));
    };

    // Intervals are drawn once up-front; every segment scans them in draw
    // order, so the result is a pure function of (values, seed).
    Rng rng = make_rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<std::pair<std::size_t, std::size_t>> intervals;
    intervals.reserve(num_intervals);
    while (intervals.size() < num_intervals) {
        std::size_t u = pick(rng);
        std::size_t v = pick(rng);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        intervals.emplace_back(u, v);
    }

    Segmentation seg;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{0, n - 1}};
    while (!stack.empty()) {
        const auto [a, b] = stack.back();
        stack.pop_back();
        if (b <= a) continue;

        double best = -1.0;
        std::size_t best_t = a;
        auto scan = [&](std::size_t u, std::size_t v) {
            for (std::size_t t = u; t < v; ++t) {
                const double value = contrast(u, v, t);
                if (value > best) {
                    best = value;
                    best_t = t;
                }
            }
        };
        scan(a, b);  // the segment itself is always a candidate
        for (const auto& [u, v] : intervals) {
            if (u >= a && v <= b) scan(u, v);
        }

        if (best > threshold) {
            seg.changepoint_times.push_back(static_cast<int>(best_t) + 1);
            if (best_t > a) stack.emplace_back(a, best_t);
            if (best_t + 1 < b) stack.emplace_back(best_t + 1, b);
        }
    }

    std::sort(seg.changepoint_times.begin(), seg.changepoint_times.end());
    fill_segment_means(seg, pre, n);
    seg.objective = segmentation_sse(seg, pre, n);
    return seg;
}

}  // namespace diffar
