#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace modclass {

using Rng = std::mt19937_64;

// Independent substreams of one trial. The numeric values are part of the
// reproducibility contract: changing them changes every result.
enum class Stream : std::uint64_t {
  Symbols = 1,
  Noise = 2,
  Channel = 3,
  TieBreak = 4,
  Sampler = 5,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed of the stream identified by (master, keys...). Order of keys matters.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = mix64(master);
  for (auto k : keys) h = mix64(h ^ mix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_seed(master, keys));
}

}  // namespace modclass
