#pragma once

#include <complex>
#include <span>
#include <vector>

namespace drx::phy {

/// Unit-energy root-raised-cosine impulse response, time in symbol periods.
double rrc_impulse(double t, double rolloff);

/// Root-raised-cosine amplitude spectrum, frequency in units of symbol rate.
/// The squared response is the raised-cosine (Nyquist) spectrum.
double rrc_spectrum(double f, double rolloff);

/// Samples of the periodic root-raised-cosine pulse train for a circular frame
/// of `symbols` symbols: taps[d] = p((d + timing_offset) / oversampling) for
/// d = 0..symbols*oversampling-1, normalized so that sum(taps^2) = 1.
///
/// The periodic pulse is evaluated exactly from its Fourier series, so shifted
/// copies by whole symbols are orthonormal for any timing offset.
std::vector<double> periodic_pulse_taps(int symbols, int oversampling, double rolloff,
                                        double timing_offset);

/// Circular pulse shaping: x[n] = sum_k symbols[k] * taps[(n - k*os) mod N].
std::vector<std::complex<double>> shape_symbols(std::span<const std::complex<double>> symbols,
                                                int oversampling, double rolloff,
                                                double timing_offset);

/// Correlates `samples` with the pulse centred on every symbol instant.
/// Inverse of shape_symbols when the pulse train is noiseless.
std::vector<std::complex<double>> correlate_symbols(
    std::span<const std::complex<double>> samples, int oversampling, double rolloff,
    double timing_offset);

}  // namespace drx::phy
