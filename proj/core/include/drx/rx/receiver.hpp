#pragma once

#include <string>
#include <string_view>

#include "drx/rx/decoders.hpp"
#include "drx/rx/equalizer.hpp"

namespace drx::rx {

enum class ReceiverChain { hard, ml, eqA_hard, eqB_hard, eqC_hard };

ReceiverChain parse_receiver_chain(std::string_view name);  // hard|ml|eqA|eqB|eqC
std::string receiver_chain_name(ReceiverChain chain);

/// Coded bits of the payload (prefix and pad removed) from demapped frame bits.
BitStream payload_bits(const BitStream& frame_bits, const McsSpec& mcs);

/// Matched filter -> optional equalizer -> hard demap -> hard decode, or soft
/// ML decoding. Returns the recovered info bits.
BitStream classical_receive(const IqFrame& frame, const McsSpec& mcs, ReceiverChain chain);

}  // namespace drx::rx
