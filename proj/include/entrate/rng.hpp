#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace entrate {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Seed for an independent sub-stream identified by a path of indices, e.g.
// derive_seed(seed, {replicate, cell}). Results depend only on the path,
// never on evaluation order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(seed);
  for (std::uint64_t step : path) s = mix64(s ^ mix64(step + 0x632be59bd9b4e019ULL));
  return s;
}

inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  return Rng(derive_seed(seed, path));
}

}  // namespace entrate
