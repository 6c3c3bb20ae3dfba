#pragma once

#include <cstdint>
#include <random>

namespace plcgp {

/// Random stream owned by a single run or probe. Never shared between threads.
using Rng = std::mt19937_64;

/// splitmix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of replication `index` within an experiment seeded with `base_seed`.
constexpr std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(base_seed) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

} // namespace plcgp
