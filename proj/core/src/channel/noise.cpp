#include "drx/channel/noise.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "drx/rng.hpp"

namespace drx::channel {

void NoiseSpec::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("noise: shape rho must be positive");
  if (mu != 0.0) throw std::invalid_argument("noise: only zero-mean noise is supported");
}

double aggn_scale(double rho, double variance) {
  return std::sqrt(variance * std::tgamma(1.0 / rho) / std::tgamma(3.0 / rho));
}

double noise_power_for(double signal_energy, int info_bits, double ebn0_db) {
  if (info_bits <= 0) throw std::invalid_argument("noise: info_bits must be positive");
  const double eb = signal_energy / info_bits;
  return eb / std::pow(10.0, ebn0_db / 10.0);
}

IqFrame apply_noise(const IqFrame& frame, const NoiseSpec& noise, double ebn0_db, int info_bits,
                    std::uint64_t seed, std::optional<double> energy) {
  frame.validate();
  noise.validate();
  if (info_bits <= 0) throw std::invalid_argument("apply_noise: info_bits must be positive");
  if (ebn0_db == std::numeric_limits<double>::infinity()) return frame;
  if (!std::isfinite(ebn0_db)) throw std::invalid_argument("apply_noise: Eb/N0 must be finite or +inf");

  const double n0 = noise_power_for(energy.value_or(frame.energy()), info_bits, ebn0_db);
  const double component_var = n0 / 2.0;
  IqFrame out = frame;
  Rng rng(derive_seed(seed, Stream::noise));

  if (noise.kind == NoiseKind::awgn) {
    std::normal_distribution<double> normal(0.0, std::sqrt(component_var));
    for (auto& s : out.samples) {
      const double i = normal(rng);
      const double q = normal(rng);
      s += std::complex<double>(i, q);
    }
    return out;
  }

  // |x/gamma|^rho ~ Gamma(1/rho, 1) with a uniformly random sign.
  const double gamma = aggn_scale(noise.rho, component_var);
  std::gamma_distribution<double> shape(1.0 / noise.rho, 1.0);
  std::bernoulli_distribution sign(0.5);
  auto draw = [&] {
    const double mag = gamma * std::pow(shape(rng), 1.0 / noise.rho);
    return sign(rng) ? -mag : mag;
  };
  for (auto& s : out.samples) {
    const double i = draw();
    const double q = draw();
    s += std::complex<double>(i, q);
  }
  return out;
}

}  // namespace drx::channel
