#pragma once

#include <cstdint>
#include <initializer_list>

namespace fas::rng {

// SplitMix64 finalizer. Used to derive independent stream seeds from a
// top-level seed and a list of stream coordinates.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream seed = fold of mix64 over (seed, coords...). Distinct coordinate
// tuples give statistically independent streams.
constexpr std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> coords) noexcept {
    std::uint64_t s = mix64(seed);
    for (auto c : coords) s = mix64(s ^ mix64(c + 0x632be59bd9b4e019ULL));
    return s;
}

// Uniform double in [0,1) from the top 53 bits.
constexpr double to_unit(std::uint64_t x) noexcept {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

// Stream tags.
inline constexpr std::uint64_t kBobStream = 0xB0B;
inline constexpr std::uint64_t kEveStream = 0xE7E;
inline constexpr std::uint64_t kMvnShift = 0x5A1F;

}  // namespace fas::rng
