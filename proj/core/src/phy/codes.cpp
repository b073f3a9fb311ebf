#include "drx/phy/codes.hpp"

#include <stdexcept>

namespace drx::phy {

CodeSpec CodeSpec::hamming74() { return {CodeKind::hamming74, 4, 7, {1, 0, 1, 1}}; }

CodeSpec CodeSpec::cyclic_7_3() { return {CodeKind::cyclic_7_3, 3, 7, {1, 1, 1, 0, 1}}; }

// Triple-error-correcting BCH(15,5).
CodeSpec CodeSpec::cyclic_15_5() {
  return {CodeKind::cyclic_15_5, 5, 15, {1, 0, 1, 0, 0, 1, 1, 0, 1, 1, 1}};
}

CodeSpec CodeSpec::from_kind(CodeKind kind) {
  switch (kind) {
    case CodeKind::hamming74: return hamming74();
    case CodeKind::cyclic_7_3: return cyclic_7_3();
    case CodeKind::cyclic_15_5: return cyclic_15_5();
  }
  throw std::invalid_argument("unknown code kind");
}

std::string CodeSpec::name() const {
  switch (kind) {
    case CodeKind::hamming74: return "hamming74";
    case CodeKind::cyclic_7_3: return "cyclic73";
    case CodeKind::cyclic_15_5: return "cyclic155";
  }
  return "unknown";
}

void CodeSpec::validate() const {
  if (k <= 0 || k >= n) throw std::invalid_argument("code: require 0 < k < n");
  if (static_cast<int>(generator.size()) != n - k + 1 || generator.front() != 1 ||
      generator.back() != 1) {
    throw std::invalid_argument("code: generator degree must equal n - k");
  }
}

CodeKind parse_code_kind(std::string_view name) {
  if (name == "hamming74") return CodeKind::hamming74;
  if (name == "cyclic73") return CodeKind::cyclic_7_3;
  if (name == "cyclic155") return CodeKind::cyclic_15_5;
  throw std::invalid_argument("unknown code: " + std::string(name));
}

std::vector<std::uint8_t> CodeSpec::syndrome(std::span<const std::uint8_t> word) const {
  if (static_cast<int>(word.size()) != n) throw std::invalid_argument("syndrome: word length != n");
  std::vector<std::uint8_t> reg(word.begin(), word.end());
  const int degree = n - k;
  for (int i = 0; i + degree < n; ++i) {
    if (!reg[i]) continue;
    for (int j = 0; j <= degree; ++j) reg[i + j] ^= generator[j];
  }
  return {reg.end() - degree, reg.end()};
}

std::vector<std::uint8_t> CodeSpec::encode_block(std::span<const std::uint8_t> info) const {
  if (static_cast<int>(info.size()) != k) throw std::invalid_argument("encode_block: block length != k");
  std::vector<std::uint8_t> word(n, 0);
  std::copy(info.begin(), info.end(), word.begin());
  auto parity = syndrome(word);
  std::copy(parity.begin(), parity.end(), word.begin() + k);
  return word;
}

std::vector<std::vector<std::uint8_t>> codebook(const CodeSpec& code) {
  std::vector<std::vector<std::uint8_t>> book;
  book.reserve(std::size_t{1} << code.k);
  std::vector<std::uint8_t> info(code.k);
  for (unsigned v = 0; v < (1U << code.k); ++v) {
    for (int i = 0; i < code.k; ++i) info[i] = (v >> (code.k - 1 - i)) & 1U;
    book.push_back(code.encode_block(info));
  }
  return book;
}

BitStream channel_encode(const CodeSpec& code, const BitStream& info) {
  info.validate();
  if (info.size() % code.k != 0) {
    throw std::invalid_argument("channel_encode: info length is not a multiple of k");
  }
  std::vector<std::uint8_t> out;
  out.reserve(info.size() / code.k * code.n);
  for (std::size_t pos = 0; pos < info.size(); pos += code.k) {
    auto word = code.encode_block(info.view().subspan(pos, code.k));
    out.insert(out.end(), word.begin(), word.end());
  }
  return BitStream(std::move(out), BitRole::coded);
}

}  // namespace drx::phy
