#pragma once

#include "drx/phy/codes.hpp"
#include "drx/rx/matched_filter.hpp"

namespace drx::rx {

/// Per-block minimum Hamming distance decoding. Hamming(7,4) uses its
/// syndrome table; the other codes search the codebook (ties: lowest info
/// value). Returns the info bits.
BitStream hard_decode(const phy::CodeSpec& code, const BitStream& coded);

/// Exact maximum-likelihood decoding under AWGN: the codeword sequence
/// minimizing the Euclidean distance between the received symbols and the
/// modulated frame (known prefix and pad included). Symbols straddling two
/// code blocks couple neighbouring blocks, which a Viterbi pass over blocks
/// resolves exactly. Requires k <= 5.
BitStream soft_ml_decode(const SoftSymbols& symbols, const McsSpec& mcs);

}  // namespace drx::rx
