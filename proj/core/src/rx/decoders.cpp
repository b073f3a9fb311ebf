#include "drx/rx/decoders.hpp"

#include <array>
#include <limits>
#include <stdexcept>

namespace drx::rx {

namespace {

// Error position (msb index) for each Hamming(7,4) syndrome value.
std::array<int, 8> hamming_syndrome_table(const phy::CodeSpec& code) {
  std::array<int, 8> table;
  table.fill(-1);
  std::vector<std::uint8_t> word(code.n, 0);
  for (int pos = 0; pos < code.n; ++pos) {
    word.assign(code.n, 0);
    word[pos] = 1;
    const auto s = code.syndrome(word);
    table[(s[0] << 2) | (s[1] << 1) | s[2]] = pos;
  }
  return table;
}

int hamming_distance(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

}  // namespace

BitStream hard_decode(const phy::CodeSpec& code, const BitStream& coded) {
  code.validate();
  if (coded.size() % code.n != 0) throw std::invalid_argument("hard_decode: length is not a multiple of n");
  std::vector<std::uint8_t> info;
  info.reserve(coded.size() / code.n * code.k);

  if (code.kind == phy::CodeKind::hamming74) {
    static const auto table = hamming_syndrome_table(phy::CodeSpec::hamming74());
    std::vector<std::uint8_t> word(code.n);
    for (std::size_t pos = 0; pos < coded.size(); pos += code.n) {
      std::copy_n(coded.bits.begin() + pos, code.n, word.begin());
      const auto s = code.syndrome(word);
      const int value = (s[0] << 2) | (s[1] << 1) | s[2];
      if (value != 0) word[table[value]] ^= 1U;
      info.insert(info.end(), word.begin(), word.begin() + code.k);
    }
    return BitStream(std::move(info), phy::BitRole::info);
  }

  const auto book = phy::codebook(code);
  for (std::size_t pos = 0; pos < coded.size(); pos += code.n) {
    const auto block = coded.view().subspan(pos, code.n);
    std::size_t best = 0;
    int best_d = std::numeric_limits<int>::max();
    for (std::size_t c = 0; c < book.size(); ++c) {
      const int d = hamming_distance(block, book[c]);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    info.insert(info.end(), book[best].begin(), book[best].begin() + code.k);
  }
  return BitStream(std::move(info), phy::BitRole::info);
}

BitStream soft_ml_decode(const SoftSymbols& symbols, const McsSpec& mcs) {
  mcs.validate();
  if (mcs.code.k > 5) throw std::invalid_argument("soft_ml_decode: code dimension k > 5 is unsupported");
  if (static_cast<int>(symbols.size()) != mcs.symbol_count()) {
    throw std::invalid_argument("soft_ml_decode: symbol count does not match the MCS");
  }
  const auto& mod = mcs.modulation;
  const int bps = mod.bits_per_symbol;
  const int n = mcs.code.n;
  const int blocks = mcs.coded_bits() / n;
  const int payload_start = mcs.prefix_bits;
  const auto book = phy::codebook(mcs.code);
  const int candidates = static_cast<int>(book.size());

  // Known bits (prefix, pad); block bits are filled per candidate.
  std::vector<std::uint8_t> bits(mcs.total_bits(), 0);
  const auto prefix = phy::prefix_pattern(mcs.prefix_bits);
  std::copy(prefix.begin(), prefix.end(), bits.begin());

  auto block_of = [&](int bit) -> int {
    if (bit < payload_start || bit >= payload_start + blocks * n) return -1;
    return (bit - payload_start) / n;
  };
  auto symbol_cost = [&](int s) {
    std::size_t index = 0;
    for (int i = 0; i < bps; ++i) index = (index << 1) | bits[s * bps + i];
    return std::norm(symbols.values[s] - mod.constellation[index]);
  };
  auto place = [&](int block, int cand) {
    std::copy(book[cand].begin(), book[cand].end(), bits.begin() + payload_start + block * n);
  };

  // unary[b][c]: symbols touching only block b; pair[b][c][c']: symbols
  // touching blocks b and b+1.
  std::vector<std::vector<double>> unary(blocks, std::vector<double>(candidates, 0.0));
  std::vector<std::vector<double>> pair(std::max(blocks - 1, 0),
                                        std::vector<double>(candidates * candidates, 0.0));
  for (int s = 0; s < mcs.symbol_count(); ++s) {
    int lo = -1;
    int hi = -1;
    for (int i = 0; i < bps; ++i) {
      const int b = block_of(s * bps + i);
      if (b < 0) continue;
      if (lo < 0) lo = b;
      hi = b;
    }
    if (lo < 0) continue;
    if (lo == hi) {
      for (int c = 0; c < candidates; ++c) {
        place(lo, c);
        unary[lo][c] += symbol_cost(s);
      }
    } else {
      for (int c = 0; c < candidates; ++c) {
        place(lo, c);
        for (int c2 = 0; c2 < candidates; ++c2) {
          place(hi, c2);
          pair[lo][c * candidates + c2] += symbol_cost(s);
        }
      }
    }
  }

  // Viterbi over blocks; strict comparisons keep the lowest index on ties.
  std::vector<double> cost = unary[0];
  std::vector<std::vector<int>> back(blocks, std::vector<int>(candidates, 0));
  for (int b = 1; b < blocks; ++b) {
    std::vector<double> next(candidates);
    for (int c2 = 0; c2 < candidates; ++c2) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (int c = 0; c < candidates; ++c) {
        const double v = cost[c] + pair[b - 1][c * candidates + c2];
        if (v < best) {
          best = v;
          arg = c;
        }
      }
      next[c2] = best + unary[b][c2];
      back[b][c2] = arg;
    }
    cost = std::move(next);
  }
  int choice = 0;
  for (int c = 1; c < candidates; ++c) {
    if (cost[c] < cost[choice]) choice = c;
  }
  std::vector<int> chosen(blocks);
  for (int b = blocks - 1; b >= 0; --b) {
    chosen[b] = choice;
    choice = back[b][choice];
  }

  std::vector<std::uint8_t> info;
  info.reserve(mcs.info_bits);
  for (int b = 0; b < blocks; ++b) {
    info.insert(info.end(), book[chosen[b]].begin(), book[chosen[b]].begin() + mcs.code.k);
  }
  return BitStream(std::move(info), phy::BitRole::info);
}

}  // namespace drx::rx
