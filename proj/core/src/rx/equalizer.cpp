#include "drx/rx/equalizer.hpp"

#include <stdexcept>

#include "drx/phy/modulation.hpp"

namespace drx::rx {

EqualizerSpec EqualizerSpec::lms_linear() {
  EqualizerSpec s;
  s.kind = EqualizerKind::lms_linear;
  s.taps = 1;
  s.ref_tap = 0;
  s.step = 0.01;
  return s;
}

EqualizerSpec EqualizerSpec::rls_linear() {
  EqualizerSpec s;
  s.kind = EqualizerKind::rls_linear;
  s.taps = 8;
  s.ref_tap = 2;
  s.forgetting = 0.99;
  return s;
}

EqualizerSpec EqualizerSpec::rls_dfe() {
  EqualizerSpec s;
  s.kind = EqualizerKind::rls_dfe;
  s.taps = 6;
  s.ref_tap = 2;
  s.forgetting = 0.99;
  s.feedback_taps = 2;
  return s;
}

std::string EqualizerSpec::name() const {
  switch (kind) {
    case EqualizerKind::lms_linear: return "lms_linear";
    case EqualizerKind::rls_linear: return "rls_linear";
    case EqualizerKind::rls_dfe: return "rls_dfe";
  }
  return "unknown";
}

void EqualizerSpec::validate() const {
  if (taps < 1) throw std::invalid_argument("equalizer: taps must be >= 1");
  if (ref_tap < 0 || ref_tap >= taps) throw std::invalid_argument("equalizer: reference tap out of range");
  if (kind == EqualizerKind::lms_linear && !(step > 0.0)) throw std::invalid_argument("equalizer: step must be positive");
  if (kind != EqualizerKind::lms_linear && !(forgetting > 0.0 && forgetting <= 1.0)) {
    throw std::invalid_argument("equalizer: forgetting factor must be in (0, 1]");
  }
  if (feedback_taps < 0) throw std::invalid_argument("equalizer: negative feedback taps");
}

EqualizerResult equalize_detailed(const SoftSymbols& symbols, const EqualizerSpec& spec,
                                  std::span<const cd> training) {
  spec.validate();
  if (training.empty()) throw std::invalid_argument("equalize: adaptive equalization needs a training prefix");
  const auto mod = phy::ModulationSpec::make(symbols.modulation);
  const int count = static_cast<int>(symbols.size());
  const int fb = spec.kind == EqualizerKind::rls_dfe ? spec.feedback_taps : 0;
  const int dim = spec.taps + fb;

  // Hermitian form internally: z = w^H v.
  std::vector<cd> w(dim, cd{});
  w[spec.ref_tap] = 1.0;
  std::vector<cd> p;  // inverse correlation, row-major dim x dim
  if (spec.kind != EqualizerKind::lms_linear) {
    p.assign(dim * dim, cd{});
    for (int i = 0; i < dim; ++i) p[i * dim + i] = spec.initial_inverse_correlation;
  }

  std::vector<cd> decisions(count, cd{});
  std::vector<cd> v(dim), pv(dim), k(dim);
  EqualizerResult result;
  result.output = symbols;
  for (int j = 0; j < count; ++j) {
    for (int t = 0; t < spec.taps; ++t) {
      const int idx = j + spec.ref_tap - t;
      v[t] = (idx >= 0 && idx < count) ? symbols.values[idx] : cd{};
    }
    for (int t = 0; t < fb; ++t) {
      const int idx = j - 1 - t;
      v[spec.taps + t] = idx >= 0 ? decisions[idx] : cd{};
    }
    cd z{};
    for (int i = 0; i < dim; ++i) z += std::conj(w[i]) * v[i];
    const cd desired = j < static_cast<int>(training.size()) ? training[j] : mod.constellation[mod.nearest(z)];
    const cd e = desired - z;
    decisions[j] = desired;
    result.output.values[j] = z;

    if (spec.kind == EqualizerKind::lms_linear) {
      for (int i = 0; i < dim; ++i) w[i] += spec.step * v[i] * std::conj(e);
      continue;
    }
    // RLS: k = P v / (lambda + v^H P v); w += k e*; P = (P - k v^H P) / lambda.
    cd denom = spec.forgetting;
    for (int r = 0; r < dim; ++r) {
      cd acc{};
      for (int c = 0; c < dim; ++c) acc += p[r * dim + c] * v[c];
      pv[r] = acc;
      denom += std::conj(v[r]) * acc;
    }
    for (int r = 0; r < dim; ++r) k[r] = pv[r] / denom;
    for (int i = 0; i < dim; ++i) w[i] += k[i] * std::conj(e);
    // v^H P row vector.
    std::vector<cd> vhp(dim, cd{});
    for (int c = 0; c < dim; ++c) {
      cd acc{};
      for (int r = 0; r < dim; ++r) acc += std::conj(v[r]) * p[r * dim + c];
      vhp[c] = acc;
    }
    for (int r = 0; r < dim; ++r) {
      for (int c = 0; c < dim; ++c) p[r * dim + c] = (p[r * dim + c] - k[r] * vhp[c]) / spec.forgetting;
    }
  }
  result.weights.resize(dim);
  for (int i = 0; i < dim; ++i) result.weights[i] = std::conj(w[i]);
  return result;
}

SoftSymbols equalize(const SoftSymbols& symbols, const EqualizerSpec& spec, std::span<const cd> training) {
  return equalize_detailed(symbols, spec, training).output;
}

}  // namespace drx::rx
