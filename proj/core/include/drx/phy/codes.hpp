#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "drx/phy/bits.hpp"

namespace drx::phy {

enum class CodeKind { hamming74, cyclic_7_3, cyclic_15_5 };

/// Systematic binary cyclic block code. Codewords are [info | parity], the
/// parity being the remainder of info(x)*x^(n-k) modulo the generator.
struct CodeSpec {
  CodeKind kind = CodeKind::hamming74;
  int k = 4;
  int n = 7;
  std::vector<std::uint8_t> generator;  // msb-first, length n-k+1

  static CodeSpec hamming74();   // g(x) = x^3 + x + 1
  static CodeSpec cyclic_7_3();  // g(x) = x^4 + x^3 + x^2 + 1
  static CodeSpec cyclic_15_5(); // g(x) = x^10 + x^8 + x^5 + x^4 + x^2 + x + 1
  static CodeSpec from_kind(CodeKind kind);

  std::string name() const;
  void validate() const;

  /// Encodes one k-bit block into an n-bit codeword.
  std::vector<std::uint8_t> encode_block(std::span<const std::uint8_t> info) const;

  /// Parity remainder of an n-bit word; zero iff the word is a codeword.
  std::vector<std::uint8_t> syndrome(std::span<const std::uint8_t> word) const;
};

CodeKind parse_code_kind(std::string_view name);

/// All 2^k codewords, indexed by the info block read msb-first.
std::vector<std::vector<std::uint8_t>> codebook(const CodeSpec& code);

/// Block-wise systematic encoding. Input length must be a multiple of k.
BitStream channel_encode(const CodeSpec& code, const BitStream& info);

}  // namespace drx::phy
