#include "drx/rx/receiver.hpp"

#include <stdexcept>

namespace drx::rx {

ReceiverChain parse_receiver_chain(std::string_view name) {
  if (name == "hard") return ReceiverChain::hard;
  if (name == "ml") return ReceiverChain::ml;
  if (name == "eqA") return ReceiverChain::eqA_hard;
  if (name == "eqB") return ReceiverChain::eqB_hard;
  if (name == "eqC") return ReceiverChain::eqC_hard;
  throw std::invalid_argument("unknown receiver chain: " + std::string(name));
}

std::string receiver_chain_name(ReceiverChain chain) {
  switch (chain) {
    case ReceiverChain::hard: return "hard";
    case ReceiverChain::ml: return "ml";
    case ReceiverChain::eqA_hard: return "eqA";
    case ReceiverChain::eqB_hard: return "eqB";
    case ReceiverChain::eqC_hard: return "eqC";
  }
  return "unknown";
}

BitStream payload_bits(const BitStream& frame_bits, const McsSpec& mcs) {
  if (static_cast<int>(frame_bits.size()) != mcs.total_bits()) {
    throw std::invalid_argument("payload_bits: frame bit count does not match the MCS");
  }
  const auto first = frame_bits.bits.begin() + mcs.prefix_bits;
  return BitStream(std::vector<std::uint8_t>(first, first + mcs.coded_bits()), phy::BitRole::coded);
}

BitStream classical_receive(const IqFrame& frame, const McsSpec& mcs, ReceiverChain chain) {
  const auto symbols = matched_filter_symbols(frame, mcs);
  if (chain == ReceiverChain::ml) return soft_ml_decode(symbols, mcs);
  if (chain == ReceiverChain::hard) return hard_decode(mcs.code, payload_bits(hard_demap(symbols), mcs));

  EqualizerSpec spec;
  switch (chain) {
    case ReceiverChain::eqA_hard: spec = EqualizerSpec::lms_linear(); break;
    case ReceiverChain::eqB_hard: spec = EqualizerSpec::rls_linear(); break;
    default: spec = EqualizerSpec::rls_dfe(); break;
  }
  const auto training = phy::training_symbols(mcs);
  const auto equalized = equalize(symbols, spec, training);
  return hard_decode(mcs.code, payload_bits(hard_demap(equalized), mcs));
}

}  // namespace drx::rx
