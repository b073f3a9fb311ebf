#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace drx::phy {

/// Complex baseband samples at `oversampling` samples per symbol.
///
/// `timing_offset` records the fractional sampling delay (in units of one
/// sample period) the frame was synthesized with. Classical receivers use it
/// as genie timing; the neural receiver never reads it.
struct IqFrame {
  std::vector<std::complex<double>> samples;
  int oversampling = 8;
  double symbol_rate = 1e6;
  double timing_offset = 0.0;

  std::size_t size() const { return samples.size(); }
  double sample_rate() const { return symbol_rate * oversampling; }
  double energy() const;
  double mean_power() const { return samples.empty() ? 0.0 : energy() / static_cast<double>(samples.size()); }

  /// Throws std::invalid_argument on empty frames or non-finite samples.
  void validate() const;
};

}  // namespace drx::phy
