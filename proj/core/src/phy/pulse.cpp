#include "drx/phy/pulse.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace drx::phy {

using std::numbers::pi;

double rrc_impulse(double t, double rolloff) {
  const double b = rolloff;
  if (std::abs(t) < 1e-12) return 1.0 - b + 4.0 * b / pi;
  if (b > 0.0 && std::abs(std::abs(t) - 1.0 / (4.0 * b)) < 1e-9) {
    return b / std::sqrt(2.0) *
           ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * b)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * b)));
  }
  const double num = std::sin(pi * t * (1.0 - b)) + 4.0 * b * t * std::cos(pi * t * (1.0 + b));
  const double den = pi * t * (1.0 - (4.0 * b * t) * (4.0 * b * t));
  return num / den;
}

double rrc_spectrum(double f, double rolloff) {
  const double af = std::abs(f);
  const double lo = (1.0 - rolloff) / 2.0;
  const double hi = (1.0 + rolloff) / 2.0;
  if (af <= lo) return 1.0;
  if (af > hi) return 0.0;
  return std::cos(pi / (2.0 * rolloff) * (af - lo));
}

std::vector<double> periodic_pulse_taps(int symbols, int oversampling, double rolloff,
                                        double timing_offset) {
  if (symbols <= 0 || oversampling < 2) {
    throw std::invalid_argument("periodic_pulse_taps: need symbols > 0 and oversampling >= 2");
  }
  if (rolloff < 0.0 || rolloff > 1.0) throw std::invalid_argument("periodic_pulse_taps: roll-off outside [0, 1]");
  const int n = symbols * oversampling;
  const double period = symbols;  // in symbol periods
  // Harmonics m/period with non-zero spectrum: |m| <= (1 + rolloff)/2 * period.
  const int max_harmonic = static_cast<int>(std::floor((1.0 + rolloff) / 2.0 * period));
  if (2 * max_harmonic >= n) throw std::invalid_argument("periodic_pulse_taps: oversampling too low");
  std::vector<double> weight(max_harmonic + 1);
  for (int m = 0; m <= max_harmonic; ++m) weight[m] = rrc_spectrum(m / period, rolloff);

  // taps[d] = w0 + 2 sum_m w_m cos(m x_d), x_d = 2 pi (d + offset) / n, by
  // Clenshaw's recurrence run for all d at once (inner loop vectorizes).
  std::vector<double> c2(n), b1(n, 0.0), b2(n, 0.0);
  for (int d = 0; d < n; ++d) c2[d] = 2.0 * std::cos(2.0 * pi * (d + timing_offset) / n);
  for (int m = max_harmonic; m >= 1; --m) {
    const double a = 2.0 * weight[m];
    for (int d = 0; d < n; ++d) {
      const double b0 = a + c2[d] * b1[d] - b2[d];
      b2[d] = b1[d];
      b1[d] = b0;
    }
  }
  std::vector<double> taps(n);
  double energy = 0.0;
  for (int d = 0; d < n; ++d) {
    taps[d] = weight[0] + 0.5 * c2[d] * b1[d] - b2[d];
    energy += taps[d] * taps[d];
  }
  const double scale = 1.0 / std::sqrt(energy);
  for (auto& v : taps) v *= scale;
  return taps;
}

std::vector<std::complex<double>> shape_symbols(std::span<const std::complex<double>> symbols,
                                                int oversampling, double rolloff,
                                                double timing_offset) {
  const int count = static_cast<int>(symbols.size());
  const auto taps = periodic_pulse_taps(count, oversampling, rolloff, timing_offset);
  const int n = count * oversampling;
  std::vector<double> re(n, 0.0), im(n, 0.0);
  for (int k = 0; k < count; ++k) {
    const double sr = symbols[k].real(), si = symbols[k].imag();
    if (sr == 0.0 && si == 0.0) continue;
    // out[i] += s * taps[(i - shift) mod n], split at the wrap point
    const int shift = k * oversampling;
    const double* t = taps.data() + (n - shift);
    for (int i = 0; i < shift; ++i) re[i] += sr * t[i], im[i] += si * t[i];
    t = taps.data() - shift;
    for (int i = shift; i < n; ++i) re[i] += sr * t[i], im[i] += si * t[i];
  }
  std::vector<std::complex<double>> out(n);
  for (int i = 0; i < n; ++i) out[i] = {re[i], im[i]};
  return out;
}

std::vector<std::complex<double>> correlate_symbols(
    std::span<const std::complex<double>> samples, int oversampling, double rolloff,
    double timing_offset) {
  const int n = static_cast<int>(samples.size());
  if (n % oversampling != 0) throw std::invalid_argument("correlate_symbols: length is not a symbol multiple");
  const int count = n / oversampling;
  const auto taps = periodic_pulse_taps(count, oversampling, rolloff, timing_offset);
  std::vector<double> re(n), im(n);
  for (int i = 0; i < n; ++i) re[i] = samples[i].real(), im[i] = samples[i].imag();
  std::vector<std::complex<double>> out(count);
  for (int k = 0; k < count; ++k) {
    const int shift = k * oversampling;
    double ar = 0.0, ai = 0.0;
    const double* t = taps.data() + (n - shift);
    for (int i = 0; i < shift; ++i) ar += re[i] * t[i], ai += im[i] * t[i];
    t = taps.data() - shift;
    for (int i = shift; i < n; ++i) ar += re[i] * t[i], ai += im[i] * t[i];
    out[k] = {ar, ai};
  }
  return out;
}

}  // namespace drx::phy
