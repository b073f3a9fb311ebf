#include "drx/phy/modulation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace drx::phy {

namespace {

// Gray-coded 4-PAM level for two bits (msb, lsb): 00 -3, 01 -1, 11 +1, 10 +3.
double pam4_level(unsigned hi, unsigned lo) {
  static constexpr double kLevels[4] = {-3.0, -1.0, 3.0, 1.0};
  return kLevels[(hi << 1) | lo];
}

}  // namespace

ModulationSpec ModulationSpec::make(ModulationKind kind) {
  ModulationSpec m;
  m.kind = kind;
  switch (kind) {
    case ModulationKind::bpsk:
      m.bits_per_symbol = 1;
      m.constellation = {cd(1.0, 0.0), cd(-1.0, 0.0)};
      break;
    case ModulationKind::qpsk: {
      m.bits_per_symbol = 2;
      const double a = 1.0 / std::sqrt(2.0);
      for (unsigned v = 0; v < 4; ++v) {
        const double i = (v & 2U) ? -a : a;
        const double q = (v & 1U) ? -a : a;
        m.constellation.emplace_back(i, q);
      }
      break;
    }
    case ModulationKind::qam16: {
      m.bits_per_symbol = 4;
      const double scale = 1.0 / std::sqrt(10.0);
      for (unsigned v = 0; v < 16; ++v) {
        const double i = pam4_level((v >> 3) & 1U, (v >> 2) & 1U);
        const double q = pam4_level((v >> 1) & 1U, v & 1U);
        m.constellation.emplace_back(i * scale, q * scale);
      }
      break;
    }
  }
  return m;
}

std::string ModulationSpec::name() const {
  switch (kind) {
    case ModulationKind::bpsk: return "bpsk";
    case ModulationKind::qpsk: return "qpsk";
    case ModulationKind::qam16: return "qam16";
  }
  return "unknown";
}

std::size_t ModulationSpec::nearest(cd value) const {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < constellation.size(); ++i) {
    const double d = std::norm(value - constellation[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

ModulationKind parse_modulation_kind(std::string_view name) {
  if (name == "bpsk") return ModulationKind::bpsk;
  if (name == "qpsk") return ModulationKind::qpsk;
  if (name == "qam16" || name == "16qam") return ModulationKind::qam16;
  throw std::invalid_argument("unknown modulation: " + std::string(name));
}

void index_to_bits(std::size_t index, int bits_per_symbol, std::uint8_t* out) {
  for (int i = 0; i < bits_per_symbol; ++i) {
    out[i] = static_cast<std::uint8_t>((index >> (bits_per_symbol - 1 - i)) & 1U);
  }
}

std::vector<cd> modulate(const ModulationSpec& mod, std::span<const std::uint8_t> bits) {
  const auto bps = static_cast<std::size_t>(mod.bits_per_symbol);
  if (bits.size() % bps != 0) {
    throw std::invalid_argument("modulate: bit count is not a multiple of bits_per_symbol");
  }
  std::vector<cd> out;
  out.reserve(bits.size() / bps);
  for (std::size_t pos = 0; pos < bits.size(); pos += bps) {
    std::size_t index = 0;
    for (std::size_t i = 0; i < bps; ++i) index = (index << 1) | (bits[pos + i] & 1U);
    out.push_back(mod.constellation[index]);
  }
  return out;
}

std::vector<cd> modulate(const ModulationSpec& mod, const BitStream& coded) {
  coded.validate();
  return modulate(mod, coded.view());
}

}  // namespace drx::phy
