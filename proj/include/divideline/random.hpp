#pragma once

#include <cstdint>
#include <random>

namespace divideline {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Purpose tags keep the streams of different consumers of one seed apart.
enum class stream : std::uint64_t {
  split = 1,
  resample = 2,
  init = 3,
  synth = 4,
};

/// Seed for the (seed, index) stream of a given purpose. Depends on nothing
/// else, so per-index work can run in any order on any thread.
constexpr std::uint64_t stream_seed(std::uint64_t seed, stream purpose, std::uint64_t index = 0) noexcept {
  return mix64(mix64(mix64(seed) ^ static_cast<std::uint64_t>(purpose)) + index);
}

using rng = std::mt19937_64;

inline rng make_rng(std::uint64_t seed, stream purpose, std::uint64_t index = 0) {
  return rng(stream_seed(seed, purpose, index));
}

}  // namespace divideline
