#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "diffar/errors.hpp"

namespace diffar::stats {

inline double mean(std::span<const double> x) {
    if (x.empty()) throw InvalidInputError("mean of an empty range");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

// Sample variance with divisor (n - ddof). ddof=1 gives the unbiased form.
inline double variance(std::span<const double> x, std::size_t ddof = 1) {
    if (x.size() <= ddof) throw InvalidInputError("variance needs more than ddof values");
    const double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - ddof);
}

inline double sd(std::span<const double> x, std::size_t ddof = 1) { return std::sqrt(variance(x, ddof)); }

inline double median(std::span<const double> x) {
    if (x.empty()) throw InvalidInputError("median of an empty range");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return (n % 2 == 1) ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Median absolute deviation about the median (no consistency factor).
inline double mad(std::span<const double> x) {
    const double med = median(x);
    std::vector<double> dev(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) dev[i] = std::abs(x[i] - med);
    return median(dev);
}

// Linear-interpolation quantile on order statistics: h = (n-1)q.
inline double quantile(std::span<const double> x, double q) {
    if (x.empty()) throw InvalidInputError("quantile of an empty range");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidInputError("quantile level must be in [0,1]");
    std::vector<double> v(x.begin(), x.end());
    std::sort(v.begin(), v.end());
    const double h = q * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Population skewness g1 = m3 / m2^(3/2).
inline double skewness(std::span<const double> x) {
    if (x.size() < 2) throw InvalidInputError("skewness needs at least 2 values");
    const double m = mean(x);
    double m2 = 0.0, m3 = 0.0;
    for (double v : x) {
        const double d = v - m;
        m2 += d * d;
        m3 += d * d * d;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    if (m2 <= 0.0) throw DegenerateSeriesError("skewness of a constant range");
    return m3 / std::pow(m2, 1.5);
}

// Population excess kurtosis g2 = m4 / m2^2 - 3.
inline double excess_kurtosis(std::span<const double> x) {
    if (x.size() < 2) throw InvalidInputError("kurtosis needs at least 2 values");
    const double m = mean(x);
    double m2 = 0.0, m4 = 0.0;
    for (double v : x) {
        const double d = v - m;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const auto n = static_cast<double>(x.size());
    m2 /= n;
    m4 /= n;
    if (m2 <= 0.0) throw DegenerateSeriesError("kurtosis of a constant range");
    return m4 / (m2 * m2) - 3.0;
}

namespace detail {

// Ranks with ties averaged (midranks).
inline std::vector<double> midranks(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && x[idx[j + 1]] == x[idx[i]]) ++j;
        const double r = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
        i = j + 1;
    }
    return rank;
}

}  // namespace detail

// Spearman rank correlation (Pearson correlation of midranks).
inline double spearman_rho(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidInputError("spearman_rho: length mismatch");
    if (a.size() < 2) throw InvalidInputError("spearman_rho needs at least 2 pairs");
    const std::vector<double> ra = detail::midranks(a);
    const std::vector<double> rb = detail::midranks(b);
    const double ma = mean(ra), mb = mean(rb);
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) throw DegenerateSeriesError("spearman_rho: constant ranks");
    return sab / std::sqrt(saa * sbb);
}

// Two-sided normal tail probability for a z statistic.
inline double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

}  // namespace diffar::stats
