#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace qualsim {

// 64-bit Mersenne Twister. One independent stream per (master seed, stream id),
// derived through std::seed_seq so that neighbouring ids do not overlap.
using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                    0x51ed270bU};
  return Rng(seq);
}

// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// SplitMix64 as a counter-based generator: the n-th output of the stream
// keyed by `key` is mix(key + (n + 1) * golden-gamma). Any output can be
// evaluated on demand without generating the ones before it.
inline std::uint64_t splitmix64(std::uint64_t key, std::uint64_t counter) {
  std::uint64_t z = key + (counter + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double counter_uniform01(std::uint64_t key, std::uint64_t counter) {
  return static_cast<double>(splitmix64(key, counter) >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Fisher-Yates, consuming exactly n-1 bounded draws.
template <typename It>
void shuffle(It first, It last, Rng& rng) {
  const auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace qualsim
