#pragma once

#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drx/phy/bits.hpp"

namespace drx::phy {

using cd = std::complex<double>;

enum class ModulationKind { bpsk, qpsk, qam16 };

/// Gray-mapped constellation with unit average symbol energy.
/// `constellation[v]` is the point for bit pattern v read msb-first.
struct ModulationSpec {
  ModulationKind kind = ModulationKind::bpsk;
  int bits_per_symbol = 1;
  std::vector<cd> constellation;

  static ModulationSpec make(ModulationKind kind);
  std::string name() const;

  /// Index of the closest constellation point (ties: lowest index).
  std::size_t nearest(cd value) const;
};

ModulationKind parse_modulation_kind(std::string_view name);

/// One symbol per bits_per_symbol bits; length must divide evenly.
std::vector<cd> modulate(const ModulationSpec& mod, std::span<const std::uint8_t> bits);
std::vector<cd> modulate(const ModulationSpec& mod, const BitStream& coded);
inline std::vector<cd> modulate(const ModulationSpec& mod, const std::vector<std::uint8_t>& bits) {
  return modulate(mod, std::span<const std::uint8_t>(bits));
}

/// Bit pattern of constellation index `index`, msb-first.
void index_to_bits(std::size_t index, int bits_per_symbol, std::uint8_t* out);

}  // namespace drx::phy
