#pragma once

#include <cmath>
#include <cstdint>

namespace east::rng {

// Counter-based generator: every draw is a pure hash of (seed, stream, counter),
// so results do not depend on how work is partitioned across threads.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

/// Uniform draw in (0, 1), never exactly 0 or 1.
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return (static_cast<double>(hash3(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Unit-mean exponential by inverse transform.
inline double exponential1(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return -std::log(uniform01(seed, stream, counter));
}

} // namespace east::rng
