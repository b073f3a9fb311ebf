#pragma once

#include <span>
#include <string>

#include "drx/rx/matched_filter.hpp"

namespace drx::rx {

enum class EqualizerKind { lms_linear, rls_linear, rls_dfe };

/// Symbol-spaced adaptive equalizer. `ref_tap` is 0-based: the output for
/// symbol j is formed while input j + ref_tap is the newest in the delay line.
struct EqualizerSpec {
  EqualizerKind kind = EqualizerKind::lms_linear;
  int taps = 1;
  int ref_tap = 0;
  double step = 0.01;
  double forgetting = 0.99;
  int feedback_taps = 0;
  double initial_inverse_correlation = 100.0;

  static EqualizerSpec lms_linear();  // 1 tap, step 0.01
  static EqualizerSpec rls_linear();  // 8 taps, reference tap 3, lambda 0.99
  static EqualizerSpec rls_dfe();     // 6 forward + 2 feedback taps, reference tap 3, lambda 0.99

  std::string name() const;
  void validate() const;
};

/// Result of equalization; `weights` are the final forward (then feedback)
/// taps, applied as z = sum(w_i * u_i).
struct EqualizerResult {
  SoftSymbols output;
  std::vector<cd> weights;
};

/// Trains on the known prefix, then continues decision-directed.
EqualizerResult equalize_detailed(const SoftSymbols& symbols, const EqualizerSpec& spec,
                                  std::span<const cd> training);

SoftSymbols equalize(const SoftSymbols& symbols, const EqualizerSpec& spec, std::span<const cd> training);

}  // namespace drx::rx
