#pragma once

#include <string>
#include <vector>

namespace drx::model {

enum class BlockKind { conv, transition, dense };

/// One stage of the backbone. `conv` and `transition` carry one width,
/// `dense` one width per BasicBlock.
struct BlockSpec {
  BlockKind kind = BlockKind::conv;
  std::vector<int> widths;

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

/// Rational channel multiplier.
struct WidthScale {
  int num = 1;
  int den = 1;

  double value() const { return static_cast<double>(num) / den; }
  bool is_unit() const { return num == den; }
  std::string text() const;
  static WidthScale parse(const std::string& text);  // "1", "1/8", "0.125"

  friend bool operator==(const WidthScale&, const WidthScale&) = default;
};

struct DeepReceiverConfig {
  int input_channels = 2;  // I, Q
  WidthScale width_scale;
  int num_bits = 32;
  int kernel_width = 5;
  std::vector<BlockSpec> layout = reference_layout();

  /// Conv(64) T(128) D[128,128] T(64) D[64x3] T(64) D[64x4] T(64) D[64x3] Conv(150).
  static std::vector<BlockSpec> reference_layout();
  static DeepReceiverConfig reference(int num_bits);
  static DeepReceiverConfig mini(int num_bits);  // width scale 1/8

  /// Scaled channel count. With a non-unit scale the result is rounded up to
  /// a multiple of 4.
  int scaled(int width) const;
  int final_channels() const;
  int feature_dim() const { return 2 * final_channels(); }
  int transitions() const;
  /// Shortest input that survives every pooling stage with length >= 1.
  int min_input_length() const { return 1 << transitions(); }

  void validate() const;

  /// key=value lines; `from_text` ignores keys it does not know.
  std::string to_text() const;
  static DeepReceiverConfig from_text(const std::string& text);
  std::string layout_text() const;
  static std::vector<BlockSpec> parse_layout(const std::string& text);

  friend bool operator==(const DeepReceiverConfig&, const DeepReceiverConfig&) = default;
};

}  // namespace drx::model
