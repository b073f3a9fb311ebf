#include "drx/rx/matched_filter.hpp"

#include <stdexcept>

#include "drx/phy/pulse.hpp"

namespace drx::rx {

SoftSymbols matched_filter_symbols(const IqFrame& frame, const McsSpec& mcs) {
  frame.validate();
  if (static_cast<int>(frame.size()) != mcs.frame_length() || frame.oversampling != mcs.oversampling) {
    throw std::invalid_argument("matched_filter_symbols: frame length does not match the MCS");
  }
  SoftSymbols out;
  out.values = phy::correlate_symbols(frame.samples, mcs.oversampling, mcs.rolloff, frame.timing_offset);
  out.modulation = mcs.modulation.kind;
  out.prefix_symbols = mcs.prefix_symbols();
  return out;
}

BitStream hard_demap(const SoftSymbols& symbols) {
  const auto mod = phy::ModulationSpec::make(symbols.modulation);
  const auto bps = static_cast<std::size_t>(mod.bits_per_symbol);
  std::vector<std::uint8_t> bits(symbols.size() * bps);
  for (std::size_t s = 0; s < symbols.size(); ++s) {
    phy::index_to_bits(mod.nearest(symbols.values[s]), mod.bits_per_symbol, bits.data() + s * bps);
  }
  return BitStream(std::move(bits), phy::BitRole::coded);
}

}  // namespace drx::rx
