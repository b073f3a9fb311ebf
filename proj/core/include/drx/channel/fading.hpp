#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "drx/phy/iq_frame.hpp"

namespace drx::channel {

using phy::IqFrame;

enum class FadingKind { none, flat_rayleigh, selective_rayleigh };

struct FadingSpec {
  FadingKind kind = FadingKind::none;
  double max_doppler_hz = 0.0;
  std::vector<double> path_delays_s;
  std::vector<double> path_gains_db;
  int oscillators = 32;

  static FadingSpec none() { return {}; }
  static FadingSpec flat(double max_doppler_hz = 30.0);
  /// Three-path profile 0 / 0.9 / 1.5 us at 0 / -3 / -6 dB. With
  /// `literal_90us` the second delay is 90 us instead.
  static FadingSpec selective(double max_doppler_hz = 30.0, bool literal_90us = false);

  std::size_t path_count() const;
  void validate() const;
};

/// Unit-power complex Rayleigh process with a classic (Jakes) Doppler
/// spectrum, built as a sum of sinusoids with random arrival angles and phases.
class RayleighProcess {
 public:
  RayleighProcess(double max_doppler_hz, int oscillators, std::uint64_t seed);
  std::complex<double> at(double time_s) const;

 private:
  std::vector<double> doppler_;  // per-oscillator Doppler frequency, Hz
  std::vector<double> phase_;
  double scale_;
};

/// Complex gain of every path at `time_s`, including the path power.
std::vector<std::complex<double>> sample_path_gains(const FadingSpec& spec, std::uint64_t seed,
                                                    double time_s);

/// Circular fractional delay by `delay` samples using a Hann-windowed sinc of
/// span 16. Integer delays are exact rotations.
std::vector<std::complex<double>> fractional_delay(const std::vector<std::complex<double>>& x,
                                                   double delay);

IqFrame apply_fading(const IqFrame& frame, const FadingSpec& spec, std::uint64_t seed);

}  // namespace drx::channel
