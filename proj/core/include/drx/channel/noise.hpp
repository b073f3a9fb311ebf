#pragma once

#include <cstdint>
#include <optional>

#include "drx/phy/iq_frame.hpp"

namespace drx::channel {

using phy::IqFrame;

enum class NoiseKind { awgn, aggn };

/// Additive noise family. AGGN draws each I/Q component from a generalized
/// Gaussian of shape `rho`; rho = 2 is the Gaussian.
struct NoiseSpec {
  NoiseKind kind = NoiseKind::awgn;
  double rho = 2.0;
  double mu = 0.0;

  static NoiseSpec awgn() { return {}; }
  static NoiseSpec aggn(double rho) { return {NoiseKind::aggn, rho, 0.0}; }
  void validate() const;
};

/// Scale gamma of the generalized Gaussian whose variance is `variance`:
/// gamma^2·Gamma(3/rho)/Gamma(1/rho) = variance.
double aggn_scale(double rho, double variance);

/// Noise power per complex sample for the requested Eb/N0, where
/// Eb = `signal_energy` / `info_bits`.
double noise_power_for(double signal_energy, int info_bits, double ebn0_db);

/// Adds independent noise to every I and Q component. Noise power is set so
/// that (energy / info_bits) / N0 = 10^(ebn0_db/10), N0 being the noise power
/// per complex sample. `energy` defaults to the energy of `frame`.
/// ebn0_db = +inf means noiseless.
IqFrame apply_noise(const IqFrame& frame, const NoiseSpec& noise, double ebn0_db, int info_bits,
                    std::uint64_t seed, std::optional<double> energy = std::nullopt);

}  // namespace drx::channel
