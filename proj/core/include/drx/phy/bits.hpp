#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace drx::phy {

enum class BitRole { info, coded };

/// Ordered sequence of binary symbols. Elements are 0 or 1.
struct BitStream {
  std::vector<std::uint8_t> bits;
  BitRole role = BitRole::info;

  BitStream() = default;
  BitStream(std::vector<std::uint8_t> b, BitRole r = BitRole::info) : bits(std::move(b)), role(r) {}

  std::size_t size() const { return bits.size(); }
  bool empty() const { return bits.empty(); }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  std::span<const std::uint8_t> view() const { return bits; }

  /// Throws std::invalid_argument if empty or if any element is not 0/1.
  void validate() const;

  friend bool operator==(const BitStream&, const BitStream&) = default;
};

/// Uniform random information bits, reproducible from `seed`.
BitStream generate_info_bits(std::size_t count, std::uint64_t seed);

/// Number of positions where `a` and `b` differ. Lengths must match.
std::size_t count_bit_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

}  // namespace drx::phy
