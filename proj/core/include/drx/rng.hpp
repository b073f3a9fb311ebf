#pragma once

#include <cstdint>
#include <random>

namespace drx {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive independent, counter-based seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of substream `stream` under `base`. Distinct streams never share a
/// generator state for practical purposes.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  return splitmix64(splitmix64(base) ^ splitmix64(stream ^ 0xD1B54A32D192ED03ULL));
}

/// Named substreams so each processing stage draws from its own generator.
enum class Stream : std::uint64_t {
  info_bits = 1,
  timing = 2,
  fading = 3,
  rf = 4,
  interference = 5,
  noise = 6,
  scenario_pick = 7,
  mcs_pick = 8,
  channel = 9,
  frame = 10,
};

constexpr std::uint64_t derive_seed(std::uint64_t base, Stream stream) {
  return derive_seed(base, static_cast<std::uint64_t>(stream));
}

/// 64-bit FNV-1a, used for configuration and file digests.
inline std::uint64_t fnv1a(const void* data, std::size_t size,
                              std::uint64_t hash = 0xCBF29CE484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    hash ^= p[i];
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace drx
