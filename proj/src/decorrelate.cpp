#include "diffar/decorrelate.hpp"

#include <cmath>
#include <string>

#include "diffar/errors.hpp"

namespace diffar {

ResidualSeries one_step_residuals(const Series& s, std::span<const double> coeffs) {
    const std::size_t p = coeffs.size();
    if (p < 1) throw InvalidInputError("need at least one AR coefficient");
    for (double c : coeffs) {
        if (!std::isfinite(c)) throw InvalidInputError("AR coefficients must be finite");
    }
    const std::size_t n = s.values.size();
    if (n <= p)
        throw InvalidInputError("need more than p = " + std::to_string(p) + " observations, have " +
                                std::to_string(n));

    ResidualSeries out;
    out.offset = p;
    out.values.resize(n - p);
    for (std::size_t t = p; t < n; ++t) {
        double pred = 0.0;
        for (std::size_t j = 1; j <= p; ++j) pred += coeffs[j - 1] * s.values[t - j];
        out.values[t - p] = s.values[t] - pred;
    }
    return out;
}

}  // namespace diffar
