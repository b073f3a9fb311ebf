#include "drx/phy/bits.hpp"

#include <stdexcept>

#include "drx/rng.hpp"

namespace drx::phy {

void BitStream::validate() const {
  if (bits.empty()) throw std::invalid_argument("bit stream is empty");
  for (auto b : bits) {
    if (b > 1) throw std::invalid_argument("bit stream contains a non-binary element");
  }
}

BitStream generate_info_bits(std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("generate_info_bits: count must be positive");
  Rng rng(derive_seed(seed, Stream::info_bits));
  std::vector<std::uint8_t> out(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng();
    out[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
  }
  return BitStream(std::move(out), BitRole::info);
}

std::size_t count_bit_errors(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("count_bit_errors: length mismatch");
  std::size_t errors = 0;
  for (std::size_t i = 0; i < a.size(); ++i) errors += (a[i] != b[i]);
  return errors;
}

}  // namespace drx::phy
