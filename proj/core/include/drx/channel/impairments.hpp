#pragma once

#include "drx/phy/iq_frame.hpp"

namespace drx::channel {

using phy::IqFrame;

inline constexpr double kSpeedOfLight = 299'792'458.0;

/// Sample n is rotated by exp(j(2*pi*delta_f*n/oversampling + theta0)), with
/// `delta_f` normalized to the symbol rate.
IqFrame apply_cfo_phase(const IqFrame& frame, double delta_f, double theta0);

/// Front-end amplitude/phase mismatch: the I part is scaled by
/// 10^(alpha/40)·exp(-j·beta·pi/360), the Q part by 10^(alpha/40)·exp(+j·beta·pi/360).
IqFrame apply_iq_imbalance(const IqFrame& frame, double alpha_db, double beta_deg);

/// Doppler shift f·v·cos(theta)/c in Hz.
double doppler_shift(double f_hz, double v_mps, double theta_rad);

}  // namespace drx::channel
