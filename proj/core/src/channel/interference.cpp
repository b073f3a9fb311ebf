#include "drx/channel/interference.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "drx/phy/pulse.hpp"
#include "drx/rng.hpp"

namespace drx::channel {

using std::numbers::pi;
using cd = std::complex<double>;

InterferenceSpec InterferenceSpec::tone(double isr_db) {
  InterferenceSpec s;
  s.kind = InterferenceKind::single_tone;
  s.isr_db = isr_db;
  return s;
}

InterferenceSpec InterferenceSpec::msk(double isr_db) {
  InterferenceSpec s;
  s.kind = InterferenceKind::msk;
  s.isr_db = isr_db;
  s.symbol_rate_ratio = 8.0 / 5.0;
  return s;
}

InterferenceSpec InterferenceSpec::bpsk(double isr_db) {
  InterferenceSpec s;
  s.kind = InterferenceKind::bpsk;
  s.isr_db = isr_db;
  s.symbol_rate_ratio = 8.0 / 7.0;
  s.rolloff = 0.3;
  return s;
}

void InterferenceSpec::validate() const {
  if (std::isnan(isr_db) || isr_db == std::numeric_limits<double>::infinity()) {
    throw std::invalid_argument("interference: ISR must be finite or -inf");
  }
  if (!(symbol_rate_ratio > 0.0)) throw std::invalid_argument("interference: symbol rate ratio must be positive");
}

std::vector<cd> interferer_waveform(const InterferenceSpec& spec, std::size_t length, int oversampling,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double half_band = (1.0 + spec.signal_rolloff) / 2.0;
  // Carrier in cycles per sample.
  const double freq = (2.0 * unit(rng) - 1.0) * half_band / oversampling;
  const double phase0 = 2.0 * pi * unit(rng);
  std::bernoulli_distribution coin(0.5);

  std::vector<cd> wave(length);
  switch (spec.kind) {
    case InterferenceKind::none:
      return wave;
    case InterferenceKind::single_tone:
      for (std::size_t n = 0; n < length; ++n) wave[n] = std::polar(1.0, 2.0 * pi * freq * n + phase0);
      return wave;
    case InterferenceKind::msk: {
      // Continuous-phase FSK, modulation index 0.5: the phase moves by
      // +/- pi/2 linearly over each symbol.
      const double sps = oversampling / spec.symbol_rate_ratio;
      const double start = unit(rng) * sps;
      double accumulated = 0.0;
      long current = 0;
      int bit = coin(rng) ? 1 : -1;
      for (std::size_t n = 0; n < length; ++n) {
        const double pos = (static_cast<double>(n) + start) / sps;
        const long sym = static_cast<long>(std::floor(pos));
        while (current < sym) {
          accumulated += bit * pi / 2.0;
          bit = coin(rng) ? 1 : -1;
          ++current;
        }
        const double phase = accumulated + bit * pi / 2.0 * (pos - sym);
        wave[n] = std::polar(1.0, phase + phase0 + 2.0 * pi * freq * n);
      }
      return wave;
    }
    case InterferenceKind::bpsk: {
      constexpr int kHalfSpan = 8;
      const double sps = oversampling / spec.symbol_rate_ratio;
      const double start = unit(rng) * sps;
      const long first = -kHalfSpan - 1;
      const long last = static_cast<long>(std::ceil((length + start) / sps)) + kHalfSpan + 1;
      std::vector<double> symbols(last - first + 1);
      for (auto& s : symbols) s = coin(rng) ? 1.0 : -1.0;
      for (std::size_t n = 0; n < length; ++n) {
        const double pos = (static_cast<double>(n) + start) / sps;  // in interferer symbols
        const long centre = static_cast<long>(std::floor(pos));
        double acc = 0.0;
        for (long k = centre - kHalfSpan; k <= centre + kHalfSpan; ++k) {
          acc += symbols[k - first] * phy::rrc_impulse(pos - static_cast<double>(k), spec.rolloff);
        }
        wave[n] = acc * std::polar(1.0, phase0 + 2.0 * pi * freq * n);
      }
      break;
    }
  }
  double power = 0.0;
  for (const auto& s : wave) power += std::norm(s);
  power /= static_cast<double>(length);
  if (power > 0.0) {
    const double scale = 1.0 / std::sqrt(power);
    for (auto& s : wave) s *= scale;
  }
  return wave;
}

IqFrame add_interference(const IqFrame& frame, const InterferenceSpec& spec, std::uint64_t seed) {
  frame.validate();
  spec.validate();
  if (spec.kind == InterferenceKind::none || spec.isr_db == -std::numeric_limits<double>::infinity()) {
    return frame;
  }
  auto wave = interferer_waveform(spec, frame.size(), frame.oversampling, seed);
  double wave_power = 0.0;
  for (const auto& s : wave) wave_power += std::norm(s);
  wave_power /= static_cast<double>(wave.size());
  const double target = frame.mean_power() * std::pow(10.0, spec.isr_db / 10.0);
  const double scale = std::sqrt(target / wave_power);
  IqFrame out = frame;
  for (std::size_t n = 0; n < out.samples.size(); ++n) out.samples[n] += scale * wave[n];
  return out;
}

}  // namespace drx::channel
