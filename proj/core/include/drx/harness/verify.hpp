#pragma once

#include <string>
#include <vector>

namespace drx::harness {

enum class VerifySuite { codecs, gradients, complexity, calibration, all };

VerifySuite parse_verify_suite(const std::string& name);

struct CheckResult {
  std::string suite;
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // bound it was compared against
  std::string detail;
};

/// Runs the module-level oracle checks of a suite. None of them needs a
/// trained model.
std::vector<CheckResult> run_verify(VerifySuite suite);

/// One JSON object per line.
std::string to_json_lines(const std::vector<CheckResult>& results);

/// Per-layer parameter table of the full-width network with the residual
/// against the reference backbone constant.
std::string parameter_report(int num_bits);

}  // namespace drx::harness
