#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "drx/channel/fading.hpp"
#include "drx/channel/impairments.hpp"
#include "drx/channel/interference.hpp"
#include "drx/channel/noise.hpp"

namespace drx::channel {

/// Closed interval a parameter is drawn from; lo == hi is a fixed value.
struct Range {
  double lo = 0.0;
  double hi = 0.0;

  static Range fixed(double v) { return {v, v}; }
  bool is_fixed() const { return lo == hi; }
  template <class Gen>
  double draw(Gen& gen) const {
    return is_fixed() ? lo : std::uniform_real_distribution<double>(lo, hi)(gen);
  }
};

struct RfImpairmentSpec {
  Range delta_f;  // normalized to the symbol rate
  Range theta0;   // radians
  double alpha_db = 0.0;
  double beta_deg = 0.0;

  bool identity() const;
};

/// Composition of fading, RF impairment, interference and noise. The ISR of
/// the interferer is drawn from `isr_db` per frame.
struct ChannelScenario {
  std::string name = "awgn";
  int id = 0;
  NoiseSpec noise;
  RfImpairmentSpec rf;
  FadingSpec fading;
  InterferenceSpec interference;
  Range isr_db{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  double ebn0_db = std::numeric_limits<double>::infinity();  // +inf: noiseless
  /// The scenario carries its own Eb/N0 (noiseless, dynamic settings) and
  /// dataset grids do not override it.
  bool pinned_ebn0 = false;

  void validate() const;
  /// Canonical one-line description of every parameter, used for digests.
  std::string describe() const;
};

/// Parameters realized for one frame.
struct ChannelDraw {
  double delta_f = 0.0;
  double theta0 = 0.0;
  double isr_db = -std::numeric_limits<double>::infinity();
};

/// Applies fading -> CFO/phase -> IQ imbalance -> interference -> noise.
/// Eb is measured on the input (transmitted) frame; each stage draws from its
/// own substream of `seed`.
IqFrame propagate(const IqFrame& frame, const ChannelScenario& scenario, int info_bits,
                  std::uint64_t seed, ChannelDraw* realized = nullptr);

/// Named presets: awgn, aggn15, aggn1, cfo, iqimb1..3, flat, selective,
/// selective90, tone, msk, bpsk-int, dynamic1..4, noiseless.
ChannelScenario scenario_preset(const std::string& name);
std::vector<std::string> scenario_preset_names();

}  // namespace drx::channel
