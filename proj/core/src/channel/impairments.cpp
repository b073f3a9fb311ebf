#include "drx/channel/impairments.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace drx::channel {

using std::numbers::pi;

IqFrame apply_cfo_phase(const IqFrame& frame, double delta_f, double theta0) {
  frame.validate();
  IqFrame out = frame;
  if (delta_f == 0.0 && theta0 == 0.0) return out;
  const double step = 2.0 * pi * delta_f / frame.oversampling;
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    out.samples[n] *= std::polar(1.0, step * static_cast<double>(n) + theta0);
  }
  return out;
}

IqFrame apply_iq_imbalance(const IqFrame& frame, double alpha_db, double beta_deg) {
  frame.validate();
  IqFrame out = frame;
  if (alpha_db == 0.0 && beta_deg == 0.0) return out;
  const double gain = std::pow(10.0, alpha_db / 40.0);
  const auto i_arm = std::polar(gain, -beta_deg * pi / 360.0);
  const auto q_arm = std::polar(gain, beta_deg * pi / 360.0);
  const std::complex<double> j(0.0, 1.0);
  for (auto& s : out.samples) s = s.real() * i_arm + j * s.imag() * q_arm;
  return out;
}

double doppler_shift(double f_hz, double v_mps, double theta_rad) {
  return f_hz * v_mps * std::cos(theta_rad) / kSpeedOfLight;
}

}  // namespace drx::channel
