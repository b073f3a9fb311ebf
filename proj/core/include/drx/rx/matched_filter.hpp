#pragma once

#include <complex>
#include <vector>

#include "drx/phy/bits.hpp"
#include "drx/phy/mcs.hpp"

namespace drx::rx {

using cd = std::complex<double>;
using phy::BitStream;
using phy::IqFrame;
using phy::McsSpec;

/// Symbol-rate matched-filter outputs of one frame. The first
/// `prefix_symbols` entries belong to the known training prefix.
struct SoftSymbols {
  std::vector<cd> values;
  phy::ModulationKind modulation = phy::ModulationKind::bpsk;
  int prefix_symbols = 0;

  std::size_t size() const { return values.size(); }
};

/// Matched filter with genie timing (the frame's recorded timing offset),
/// decimated at every symbol instant.
SoftSymbols matched_filter_symbols(const IqFrame& frame, const McsSpec& mcs);

/// Nearest-point decision and Gray demapping of every symbol.
BitStream hard_demap(const SoftSymbols& symbols);

}  // namespace drx::rx
