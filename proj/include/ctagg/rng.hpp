#pragma once

#include <bit>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace ctagg {

// All randomness in the project flows through these helpers on top of
// std::mt19937_64, whose output sequence is pinned by the standard.
// std::uniform_int_distribution is implementation-defined, so results
// would not be reproducible across standard libraries.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Deterministic sub-seed from a master seed and a list of stream tags.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t s = splitmix64(master);
    for (auto t : tags) s = splitmix64(s ^ splitmix64(t));
    return s;
}

// Uniform draw from [0, bound) by masked rejection sampling.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    if (bound == 1) return 0;
    std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(bound - 1);
    std::uint64_t v;
    do {
        v = rng() & mask;
    } while (v >= bound);
    return v;
}

// Bernoulli(p). p <= 0 and p >= 1 short-circuit without consuming a draw.
inline bool bernoulli(std::mt19937_64& rng, double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return (rng() >> 11) * 0x1.0p-53 < p;
}

}  // namespace ctagg
