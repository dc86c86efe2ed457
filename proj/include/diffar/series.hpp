#pragma once

#include <cstddef>
#include <vector>

namespace diffar {

// Observed series x_1..x_N stored 0-based in `values`. `origin` is the known
// sampling index of values[0]; it is metadata for I/O and never enters
// estimation.
struct Series {
    std::vector<double> values;
    int origin = 1;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

// Lag-1 differences d_t = x_t - x_{t-1} for t = 2..N, so values.size() == N-1.
struct DiffSeries {
    std::vector<double> values;

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

// Piecewise-constant mean structure. `times` holds the 1-based changepoint
// times, each the last index of its regime, strictly increasing, each in
// {2..N}. `means` holds the m+1 regime levels; m = 0 (no times) is a single
// regime.
struct ChangepointConfig {
    std::vector<int> times;
    std::vector<double> means;

    [[nodiscard]] std::size_t num_changepoints() const noexcept { return times.size(); }
};

// Throws InvalidInputError unless the series has at least 2 finite values.
void validate_series(const Series& s);

// Throws InvalidConfigError unless the config is internally consistent and
// applicable to a series of length n (times strictly increasing in {2..n},
// means finite with exactly times.size()+1 entries).
void validate_config(const ChangepointConfig& config, std::size_t n);

// 0-based index of the regime that time t (1-based) belongs to.
std::size_t segment_index(const ChangepointConfig& config, int t);

// Adds the regime mean to every observation: y_t = x_t + mu_{s(t)}.
Series apply_mean_shifts(const Series& s, const ChangepointConfig& config);

// Lag-1 differencing; requires N >= 2.
DiffSeries difference(const Series& s);

}  // namespace diffar
