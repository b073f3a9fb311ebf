#include "drx/phy/mcs.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "drx/phy/pulse.hpp"
#include "drx/rng.hpp"

namespace drx::phy {

double IqFrame::energy() const {
  double e = 0.0;
  for (const auto& s : samples) e += std::norm(s);
  return e;
}

void IqFrame::validate() const {
  if (samples.empty()) throw std::invalid_argument("IQ frame is empty");
  for (const auto& s : samples) {
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
      throw std::invalid_argument("IQ frame contains non-finite samples");
    }
  }
}

std::string McsSpec::name() const {
  if (id >= 1 && id <= 6) return "mcs" + std::to_string(id);
  return modulation.name() + "-" + code.name();
}

void McsSpec::validate() const {
  code.validate();
  if (info_bits <= 0 || info_bits % code.k != 0) {
    throw std::invalid_argument("mcs: info bits must be a positive multiple of k");
  }
  if (prefix_bits < 0 || pad_zero_bits < 0) throw std::invalid_argument("mcs: negative prefix/pad");
  if (total_bits() % modulation.bits_per_symbol != 0) {
    throw std::invalid_argument("mcs: frame bits not a multiple of bits_per_symbol");
  }
  if (oversampling < 2) throw std::invalid_argument("mcs: oversampling must be >= 2");
  if (rolloff <= 0.0 || rolloff > 1.0) throw std::invalid_argument("mcs: roll-off outside (0, 1]");
}

McsSpec make_mcs(ModulationKind mod, CodeKind code, int info_bits, int prefix_bits) {
  McsSpec m;
  m.modulation = ModulationSpec::make(mod);
  m.code = CodeSpec::from_kind(code);
  m.info_bits = info_bits;
  m.prefix_bits = prefix_bits;
  const int bps = m.modulation.bits_per_symbol;
  const int rem = (m.prefix_bits + m.coded_bits()) % bps;
  m.pad_zero_bits = rem == 0 ? 0 : bps - rem;
  m.validate();
  return m;
}

McsSpec table_mcs(int index, int info_bits, int prefix_bits) {
  static constexpr ModulationKind kMods[] = {ModulationKind::bpsk, ModulationKind::qpsk,
                                             ModulationKind::qam16};
  if (index < 1 || index > 6) throw std::invalid_argument("table_mcs: index must be 1..6");
  const auto mod = kMods[(index - 1) / 2];
  const auto code = (index % 2 == 1) ? CodeKind::cyclic_7_3 : CodeKind::cyclic_15_5;
  auto m = make_mcs(mod, code, info_bits, prefix_bits);
  m.id = index;
  return m;
}

McsSpec mcs_by_name(const std::string& name, int info_bits, int prefix_bits) {
  if (name.size() == 4 && name.starts_with("mcs")) return table_mcs(name[3] - '0', info_bits, prefix_bits);
  const auto dash = name.find('-');
  if (dash == std::string::npos) throw std::invalid_argument("unknown mcs: " + name);
  return make_mcs(parse_modulation_kind(name.substr(0, dash)), parse_code_kind(name.substr(dash + 1)),
                  info_bits, prefix_bits);
}

std::vector<std::uint8_t> prefix_pattern(int length) {
  std::vector<std::uint8_t> out(std::max(length, 0));
  unsigned state = 0x7F;
  for (auto& bit : out) {
    bit = static_cast<std::uint8_t>(state & 1U);
    const unsigned feedback = ((state >> 6) ^ (state >> 5)) & 1U;
    state = ((state << 1) | feedback) & 0x7FU;
  }
  return out;
}

std::vector<std::uint8_t> frame_bits(const McsSpec& mcs, const BitStream& info) {
  auto bits = prefix_pattern(mcs.prefix_bits);
  const auto coded = channel_encode(mcs.code, info);
  bits.insert(bits.end(), coded.bits.begin(), coded.bits.end());
  bits.insert(bits.end(), mcs.pad_zero_bits, 0);
  return bits;
}

std::vector<cd> training_symbols(const McsSpec& mcs) {
  const int usable = mcs.prefix_symbols() * mcs.modulation.bits_per_symbol;
  auto bits = prefix_pattern(usable);
  return modulate(mcs.modulation, std::span<const std::uint8_t>(bits));
}

IqFrame pulse_shape(std::span<const cd> symbols, const McsSpec& mcs, double timing_offset) {
  if (mcs.oversampling < 2) throw std::invalid_argument("pulse_shape: oversampling must be >= 2");
  if (!(timing_offset >= 0.0 && timing_offset < 1.0)) {
    throw std::invalid_argument("pulse_shape: timing offset outside [0, 1)");
  }
  if (symbols.empty()) throw std::invalid_argument("pulse_shape: no symbols");
  IqFrame frame;
  frame.samples = shape_symbols(symbols, mcs.oversampling, mcs.rolloff, timing_offset);
  frame.oversampling = mcs.oversampling;
  frame.symbol_rate = mcs.symbol_rate;
  frame.timing_offset = timing_offset;
  return frame;
}

std::pair<IqFrame, BitStream> build_frame(const McsSpec& mcs, const BitStream& info,
                                          std::uint64_t seed) {
  mcs.validate();
  if (static_cast<int>(info.size()) != mcs.info_bits) {
    throw std::invalid_argument("build_frame: info length does not match the MCS");
  }
  const auto bits = frame_bits(mcs, info);
  const auto symbols = modulate(mcs.modulation, std::span<const std::uint8_t>(bits));
  Rng rng(derive_seed(seed, Stream::timing));
  const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  return {pulse_shape(symbols, mcs, offset), info};
}

}  // namespace drx::phy
