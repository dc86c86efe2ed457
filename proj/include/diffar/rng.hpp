#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace diffar {

// Engine used everywhere randomness is needed. Seeded explicitly; no global
// state.
using Rng = std::mt19937_64;

// Master seed used by the CLI when neither --seed nor DIFFAR_SEED is given.
inline constexpr std::uint64_t kDefaultSeed = 42;

namespace detail {

// splitmix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace detail

// Derives an independent stream seed from a master seed and a tuple of stream
// ids. Distinct id tuples (including tuples of different lengths or orders)
// yield decorrelated seeds, so replication r of cell c can always be seeded
// as derive_seed(master, c, r) regardless of execution order or thread count.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t h = detail::mix64(master);
    for (std::uint64_t id : ids) h = detail::mix64(h ^ detail::mix64(id));
    return h;
}

template <typename... Ids>
std::uint64_t derive_seed(std::uint64_t master, Ids... ids) {
    return derive_seed(master, std::initializer_list<std::uint64_t>{static_cast<std::uint64_t>(ids)...});
}

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace diffar
