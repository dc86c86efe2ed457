#include "diffar/simulate.hpp"

#include <cmath>

#include "diffar/errors.hpp"

namespace diffar {

std::size_t default_burnin(const ARModel& model) { return 10 * static_cast<std::size_t>(model.order) + 500; }

Series simulate_ar(const ARModel& model, std::size_t n, Rng& rng, std::optional<std::size_t> burnin,
                   InnovationGenerator innovations) {
    validate_model(model);
    if (n < 1) throw InvalidInputError("simulation length must be >= 1");
    if (!innovations) innovations = gaussian_innovations();
    const std::size_t warm = burnin.value_or(default_burnin(model));
    const auto p = static_cast<std::size_t>(model.order);
    const double scale = std::sqrt(model.noise_var);

    // lags[j] = x_{t-1-j}; zero initial state is forgotten during burn-in.
    std::vector<double> lags(p, 0.0);
    Series out;
    out.values.reserve(n);
    for (std::size_t step = 0; step < warm + n; ++step) {
        double x = scale * innovations(rng);
        for (std::size_t j = 0; j < p; ++j) x += model.coeffs[j] * lags[j];
        for (std::size_t j = p; j-- > 1;) lags[j] = lags[j - 1];
        if (p > 0) lags[0] = x;
        if (step >= warm) out.values.push_back(x);
    }
    return out;
}

Series simulate_ar(const ARModel& model, std::size_t n, std::uint64_t seed, std::optional<std::size_t> burnin,
                   InnovationGenerator innovations) {
    Rng rng = make_rng(seed);
    return simulate_ar(model, n, rng, burnin, std::move(innovations));
}

}  // namespace diffar
