#pragma once

#include <cstdint>
#include <random>

namespace debtnet {

/// splitmix64 finalizer; used both as a mixer and to stretch seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic child seed from a base seed and one or more stream indices.
inline std::uint64_t derive_seed(std::uint64_t base) { return splitmix64(base); }

template <typename... Rest>
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, Rest... rest) {
    return derive_seed(splitmix64(base ^ (index + 0x9e3779b97f4a7c15ULL)), rest...);
}

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(splitmix64(seed)); }

}  // namespace debtnet
