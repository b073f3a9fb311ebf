#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "drx/phy/bits.hpp"
#include "drx/phy/codes.hpp"
#include "drx/phy/iq_frame.hpp"
#include "drx/phy/modulation.hpp"

namespace drx::phy {

/// Modulation, channel code and framing of one transmission format.
///
/// Frame bit layout: [prefix (L bits, known)] [coded payload] [pad zeros].
struct McsSpec {
  int id = 0;  // 1..6 for the tabulated formats, 0 for ad-hoc ones
  ModulationSpec modulation = ModulationSpec::make(ModulationKind::bpsk);
  CodeSpec code = CodeSpec::hamming74();
  int info_bits = 32;
  int pad_zero_bits = 0;
  int prefix_bits = 0;
  int oversampling = 8;
  double rolloff = 0.5;
  int filter_span_symbols = 8;
  double symbol_rate = 1e6;

  int coded_bits() const { return info_bits / code.k * code.n; }
  int total_bits() const { return prefix_bits + coded_bits() + pad_zero_bits; }
  int symbol_count() const { return total_bits() / modulation.bits_per_symbol; }
  int frame_length() const { return symbol_count() * oversampling; }
  int prefix_symbols() const { return prefix_bits / modulation.bits_per_symbol; }

  std::string name() const;
  void validate() const;
};

/// Builds an MCS; the zero pad is the smallest count making the bit total a
/// multiple of bits_per_symbol.
McsSpec make_mcs(ModulationKind mod, CodeKind code, int info_bits, int prefix_bits = 0);

/// The six tabulated formats (index 1..6), 30 information bits by default.
McsSpec table_mcs(int index, int info_bits = 30, int prefix_bits = 0);

/// Looks up "bpsk-hamming74", "qpsk-hamming74" or "mcs1".."mcs6".
McsSpec mcs_by_name(const std::string& name, int info_bits, int prefix_bits = 0);

/// First `length` bits of a fixed maximal-length sequence (x^7 + x^6 + 1,
/// all-ones start state). Identical for every frame.
std::vector<std::uint8_t> prefix_pattern(int length);

/// Prefix, encoded payload and pad, in transmission order.
std::vector<std::uint8_t> frame_bits(const McsSpec& mcs, const BitStream& info);

/// Modulated symbols of the known prefix.
std::vector<cd> training_symbols(const McsSpec& mcs);

/// Circular pulse shaping of `symbols` using the MCS oversampling/roll-off.
/// `timing_offset` is a fraction of one sample period in [0, 1).
IqFrame pulse_shape(std::span<const cd> symbols, const McsSpec& mcs, double timing_offset);

/// Encode, frame, modulate and pulse-shape `info` with a seeded random timing
/// offset. Returns the transmit frame and the label bits (= info).
std::pair<IqFrame, BitStream> build_frame(const McsSpec& mcs, const BitStream& info,
                                          std::uint64_t seed);

}  // namespace drx::phy
