#ifndef STW_RNG_HPP
#define STW_RNG_HPP

#include <cmath>
#include <cstdint>

namespace stw {

/// Deterministic seed for one Monte Carlo path. Identical
/// (master_seed, path_index) pairs reproduce identical Brownian increments
/// bit-for-bit, independent of thread scheduling.
struct PathSeed {
    std::uint64_t master_seed = 0;
    std::uint64_t path_index = 0;
};

namespace rng {

// SplitMix64 finalizer; good avalanche for counter-based derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t key, std::uint64_t a,
                                  std::uint64_t b, std::uint64_t c) {
    std::uint64_t h = mix64(key);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// Uniform in (0, 1]; never returns 0 so log() is safe.
inline double u01(std::uint64_t h) {
    return (static_cast<double>(h >> 11) + 1.0) * 0x1p-53;
}

/// Standard normal derived from the counter (path, step, index) under the
/// given master seed, via Box-Muller on two hashed uniforms.
inline double standard_normal(std::uint64_t master_seed, std::uint64_t path,
                              std::uint64_t step, std::uint64_t index) {
    const std::uint64_t key = mix64(master_seed) ^ mix64(path * 0x5851f42d4c957f2dULL);
    const double u1 = u01(counter_hash(key, step, index, 0x1ULL));
    const double u2 = u01(counter_hash(key, step, index, 0x2ULL));
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

} // namespace rng
} // namespace stw

#endif
