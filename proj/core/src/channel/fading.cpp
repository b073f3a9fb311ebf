#include "drx/channel/fading.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "drx/rng.hpp"

namespace drx::channel {

using std::numbers::pi;

FadingSpec FadingSpec::flat(double max_doppler_hz) {
  FadingSpec s;
  s.kind = FadingKind::flat_rayleigh;
  s.max_doppler_hz = max_doppler_hz;
  s.path_delays_s = {0.0};
  s.path_gains_db = {0.0};
  return s;
}

FadingSpec FadingSpec::selective(double max_doppler_hz, bool literal_90us) {
  FadingSpec s;
  s.kind = FadingKind::selective_rayleigh;
  s.max_doppler_hz = max_doppler_hz;
  s.path_delays_s = {0.0, literal_90us ? 90e-6 : 0.9e-6, 1.5e-6};
  s.path_gains_db = {0.0, -3.0, -6.0};
  return s;
}

std::size_t FadingSpec::path_count() const {
  switch (kind) {
    case FadingKind::none: return 0;
    case FadingKind::flat_rayleigh: return 1;
    case FadingKind::selective_rayleigh: return path_delays_s.size();
  }
  return 0;
}

void FadingSpec::validate() const {
  if (max_doppler_hz < 0.0) throw std::invalid_argument("fading: negative Doppler");
  if (oscillators < 1) throw std::invalid_argument("fading: need at least one oscillator");
  if (kind == FadingKind::selective_rayleigh) {
    if (path_delays_s.empty() || path_delays_s.size() != path_gains_db.size()) {
      throw std::invalid_argument("fading: delay/gain lists must be non-empty and equal length");
    }
    if (path_delays_s.front() != 0.0) throw std::invalid_argument("fading: first path delay must be 0");
    for (double d : path_delays_s) {
      if (d < 0.0) throw std::invalid_argument("fading: negative path delay");
    }
  }
}

RayleighProcess::RayleighProcess(double max_doppler_hz, int oscillators, std::uint64_t seed)
    : doppler_(oscillators), phase_(oscillators), scale_(1.0 / std::sqrt(static_cast<double>(oscillators))) {
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * pi);
  for (int i = 0; i < oscillators; ++i) {
    doppler_[i] = max_doppler_hz * std::cos(angle(rng));
    phase_[i] = angle(rng);
  }
}

std::complex<double> RayleighProcess::at(double time_s) const {
  std::complex<double> acc{};
  for (std::size_t i = 0; i < doppler_.size(); ++i) {
    acc += std::polar(1.0, 2.0 * pi * doppler_[i] * time_s + phase_[i]);
  }
  return acc * scale_;
}

std::vector<std::complex<double>> sample_path_gains(const FadingSpec& spec, std::uint64_t seed,
                                                    double time_s) {
  spec.validate();
  std::vector<std::complex<double>> gains;
  const auto paths = spec.path_count();
  for (std::size_t p = 0; p < paths; ++p) {
    const double db = spec.kind == FadingKind::flat_rayleigh ? 0.0 : spec.path_gains_db[p];
    RayleighProcess proc(spec.max_doppler_hz, spec.oscillators, derive_seed(seed, p));
    gains.push_back(std::sqrt(std::pow(10.0, db / 10.0)) * proc.at(time_s));
  }
  return gains;
}

std::vector<std::complex<double>> fractional_delay(const std::vector<std::complex<double>>& x,
                                                   double delay) {
  constexpr int kHalfSpan = 8;
  const int n = static_cast<int>(x.size());
  std::vector<std::complex<double>> y(n);
  const double whole = std::floor(delay);
  const double frac = delay - whole;
  const int shift = static_cast<int>(whole);
  auto wrap = [n](int i) { return ((i % n) + n) % n; };
  if (frac == 0.0) {
    for (int i = 0; i < n; ++i) y[i] = x[wrap(i - shift)];
    return y;
  }
  // y[i] = sum_m x[m] h(i - delay - m), h = sinc * Hann over |u| < 8.
  double taps[2 * kHalfSpan];
  // With m = i - shift + j the kernel argument is -frac - j.
  for (int j = -kHalfSpan; j < kHalfSpan; ++j) {
    const double u = -frac - j;
    const double sinc = std::sin(pi * u) / (pi * u);
    const double window = 0.5 * (1.0 + std::cos(pi * u / kHalfSpan));
    taps[j + kHalfSpan] = sinc * window;
  }
  for (int i = 0; i < n; ++i) {
    std::complex<double> acc{};
    for (int j = -kHalfSpan; j < kHalfSpan; ++j) {
      acc += x[wrap(i - shift + j)] * taps[j + kHalfSpan];
    }
    y[i] = acc;
  }
  return y;
}

IqFrame apply_fading(const IqFrame& frame, const FadingSpec& spec, std::uint64_t seed) {
  frame.validate();
  spec.validate();
  if (spec.kind == FadingKind::none) return frame;
  const double fs = frame.sample_rate();
  const auto n = frame.samples.size();
  const double duration = static_cast<double>(n) / fs;
  IqFrame out = frame;
  std::fill(out.samples.begin(), out.samples.end(), std::complex<double>{});
  const auto paths = spec.path_count();
  for (std::size_t p = 0; p < paths; ++p) {
    const double delay_s = spec.kind == FadingKind::flat_rayleigh ? 0.0 : spec.path_delays_s[p];
    if (delay_s >= duration) throw std::invalid_argument("fading: path delay exceeds frame duration");
    const double db = spec.kind == FadingKind::flat_rayleigh ? 0.0 : spec.path_gains_db[p];
    const double amplitude = std::sqrt(std::pow(10.0, db / 10.0));
    RayleighProcess proc(spec.max_doppler_hz, spec.oscillators, derive_seed(seed, p));
    const auto delayed = delay_s == 0.0 ? frame.samples : fractional_delay(frame.samples, delay_s * fs);
    for (std::size_t i = 0; i < n; ++i) {
      out.samples[i] += amplitude * proc.at(static_cast<double>(i) / fs) * delayed[i];
    }
  }
  return out;
}

}  // namespace drx::channel
