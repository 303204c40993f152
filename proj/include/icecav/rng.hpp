#pragma once

#include <cstdint>
#include <random>

namespace icecav {

using Rng = std::mt19937_64;

/// splitmix64 finaliser; used to derive independent stream seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` of purpose `tag` under a master seed.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return mix_seed(mix_seed(mix_seed(seed) ^ tag) ^ index);
}

}  // namespace icecav
