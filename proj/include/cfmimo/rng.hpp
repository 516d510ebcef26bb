#pragma once

#include <cstdint>
#include <random>

namespace cfmimo {

/// SplitMix64 finalizer; used to decorrelate integer stream keys.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of an independent substream: master seed xor a hash of (index, tag).
constexpr std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t tag = 0) noexcept
{
    return seed ^ mix64(index ^ mix64(tag + 0x5851f42d4c957f2dULL));
}

using Rng = std::mt19937_64;

} // namespace cfmimo
