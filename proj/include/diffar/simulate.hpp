#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>

#include "diffar/ar_model.hpp"
#include "diffar/rng.hpp"
#include "diffar/series.hpp"

namespace diffar {

// Draws one innovation with unit variance. Implementations may keep internal
// state (cached pairs); create a fresh generator per independent stream.
using InnovationGenerator = std::function<double(Rng&)>;

// Standard normal innovations.
inline InnovationGenerator gaussian_innovations() {
    return [dist = std::normal_distribution<double>{}](Rng& rng) mutable { return dist(rng); };
}

// Warm-up length used when none is given: 10*order + 500 steps discarded
// before recording, enough to wash out the zero initial state.
[[nodiscard]] std::size_t default_burnin(const ARModel& model);

// Simulates n observations of a causal AR model. Deterministic given the rng
// state (or seed), the burn-in, and the innovation generator; an empty
// generator means standard normal. Throws InvalidModelError for invalid
// models and InvalidInputError for n < 1.
[[nodiscard]] Series simulate_ar(const ARModel& model, std::size_t n, Rng& rng,
                                 std::optional<std::size_t> burnin = std::nullopt,
                                 InnovationGenerator innovations = {});

[[nodiscard]] Series simulate_ar(const ARModel& model, std::size_t n, std::uint64_t seed,
                                 std::optional<std::size_t> burnin = std::nullopt,
                                 InnovationGenerator innovations = {});

}  // namespace diffar
