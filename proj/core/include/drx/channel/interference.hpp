#pragma once

#include <cstdint>
#include <limits>

#include "drx/phy/iq_frame.hpp"

namespace drx::channel {

using phy::IqFrame;

enum class InterferenceKind { none, single_tone, msk, bpsk };

/// Co-channel interferer. The centre frequency is drawn uniformly within
/// +/-(1 + signal_rolloff)/2 symbol rates of the signal centre.
struct InterferenceSpec {
  InterferenceKind kind = InterferenceKind::none;
  double isr_db = -std::numeric_limits<double>::infinity();
  double symbol_rate_ratio = 1.0;  // interferer symbol rate / signal symbol rate
  double rolloff = 0.3;            // bpsk interferer pulse
  double signal_rolloff = 0.5;

  static InterferenceSpec none() { return {}; }
  static InterferenceSpec tone(double isr_db);
  static InterferenceSpec msk(double isr_db);   // symbol rate 8/5, h = 0.5
  static InterferenceSpec bpsk(double isr_db);  // symbol rate 8/7, roll-off 0.3

  void validate() const;
};

/// Interferer waveform of unit mean power, length `length`.
std::vector<std::complex<double>> interferer_waveform(const InterferenceSpec& spec, std::size_t length,
                                                      int oversampling, std::uint64_t seed);

/// Adds the interferer scaled so that its power over the frame is
/// 10^(isr_db/10) times the frame power. isr_db = -inf is the identity.
IqFrame add_interference(const IqFrame& frame, const InterferenceSpec& spec, std::uint64_t seed);

}  // namespace drx::channel
