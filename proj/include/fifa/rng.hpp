#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace fifa {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace detail

/// Derives an independent stream seed from a master seed, a stream name and
/// an index.  All randomness in the toolkit flows from one master seed
/// through this splitter so that sweeps are reproducible trial by trial.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream,
                                 std::uint64_t index = 0) {
    std::uint64_t h = detail::splitmix64(master);
    for (char c : stream) h = detail::splitmix64(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(c)));
    return detail::splitmix64(h ^ index);
}

/// Uniform double in [0, 1) with 53 bits of the engine's output.  Used
/// instead of std::uniform_real_distribution so the byte stream does not
/// depend on the standard library implementation.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi).
inline double uniform(std::mt19937_64& gen, double lo, double hi) {
    return lo + (hi - lo) * uniform01(gen);
}

/// Standard normal via Box-Muller; each draw consumes exactly two engine
/// words (the sine branch is discarded).
inline double standard_normal(std::mt19937_64& gen) {
    double u1 = uniform01(gen);
    const double u2 = uniform01(gen);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace fifa
