#pragma once

#include <cstdint>
#include <random>

namespace rilab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seed splitting rule: child k of a parent seed is mix64(parent + (k + 1) * golden).
/// Experiments derive cell seeds from the root seed and trial seeds from cell seeds,
/// so any trial can be regenerated without replaying the others.
constexpr std::uint64_t child_seed(std::uint64_t parent, std::uint64_t k) {
    return mix64(parent + (k + 1) * 0x9E3779B97F4A7C15ULL);
}

/// Fixed sub-stream indices inside one Monte Carlo trial.
namespace stream {
inline constexpr std::uint64_t sensors = 0;
inline constexpr std::uint64_t illuminations = 1;
inline constexpr std::uint64_t scene = 2;
inline constexpr std::uint64_t noise = 3;
} // namespace stream

} // namespace rilab
