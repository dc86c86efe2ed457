#include "diffar/series.hpp"

#include <cmath>
#include <string>

#include "diffar/errors.hpp"

namespace diffar {

void validate_series(const Series& s) {
    if (s.values.size() < 2) throw InvalidInputError("series needs at least 2 observations");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (!std::isfinite(s.values[i]))
            throw InvalidInputError("series has a non-finite value at index " + std::to_string(i + 1));
    }
}

void validate_config(const ChangepointConfig& config, std::size_t n) {
    if (config.means.size() != config.times.size() + 1)
        throw InvalidConfigError("changepoint config needs exactly one mean per segment (" +
                                 std::to_string(config.times.size() + 1) + " expected, " +
                                 std::to_string(config.means.size()) + " given)");
    for (double m : config.means) {
        if (!std::isfinite(m)) throw InvalidConfigError("segment means must be finite");
    }
    int prev = 1;
    for (int t : config.times) {
        if (t < 2 || static_cast<std::size_t>(t) > n)
            throw InvalidConfigError("changepoint time " + std::to_string(t) + " outside {2.." + std::to_string(n) +
                                     "}");
        if (t <= prev) throw InvalidConfigError("changepoint times must be strictly increasing");
        prev = t;
    }
}

std::size_t segment_index(const ChangepointConfig& config, int t) {
    std::size_t s = 0;
    while (s < config.times.size() && config.times[s] < t) ++s;
    return s;
}

Series apply_mean_shifts(const Series& s, const ChangepointConfig& config) {
    validate_config(config, s.values.size());
    Series out = s;
    std::size_t seg = 0;
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        const int t = static_cast<int>(i) + 1;
        while (seg < config.times.size() && config.times[seg] < t) ++seg;
        out.values[i] += config.means[seg];
    }
    return out;
}

DiffSeries difference(const Series& s) {
    if (s.values.size() < 2) throw InvalidInputError("differencing needs at least 2 observations");
    DiffSeries d;
    d.values.resize(s.values.size() - 1);
    for (std::size_t i = 0; i + 1 < s.values.size(); ++i) d.values[i] = s.values[i + 1] - s.values[i];
    return d;
}

}  // namespace diffar
