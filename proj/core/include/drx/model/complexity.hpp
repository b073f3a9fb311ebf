#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "drx/model/config.hpp"
#include "drx/model/deep_receiver.hpp"

namespace drx::model {

/// Reference constants for the full-width network.
inline constexpr std::size_t kReferenceBackboneParams = 1248322;
inline constexpr std::size_t kParamsPerHead = 602;

struct ParamCounts {
  std::size_t total = 0;
  std::size_t backbone = 0;
  std::size_t heads = 0;
};

/// Sums the sizes of the model's trainable tensors.
template <typename T>
ParamCounts count_params(const DeepReceiver<T>& model);

/// One trainable layer as derived from the config alone.
struct LayerParamRow {
  std::string name;
  std::string kind;  // conv, bn, heads
  int in_channels = 0;
  int out_channels = 0;
  std::size_t weights = 0;
  std::size_t biases = 0;
  std::size_t total() const { return weights + biases; }
};

std::vector<LayerParamRow> parameter_table(const DeepReceiverConfig& config);
ParamCounts count_params(const DeepReceiverConfig& config);

enum class ConvPadding { same, valid };

/// One intermediate tensor of a single-item forward pass.
struct FeatureShape {
  std::string name;
  int length = 0;
  int channels = 0;
  std::size_t size() const { return static_cast<std::size_t>(length) * channels; }
};

/// Every intermediate tensor for input length N. `valid` walks the same
/// network as if convolutions dropped P-1 samples instead of padding.
std::vector<FeatureShape> feature_shapes(const DeepReceiverConfig& config, int input_length,
                                         ConvPadding padding = ConvPadding::same);
std::size_t max_feature_map(const DeepReceiverConfig& config, int input_length,
                            ConvPadding padding = ConvPadding::same);

/// Operation tally: conv H*C*P*K, BN and ReLU H*C each, pooling H*C*F/D.
struct OperationCount {
  std::uint64_t conv = 0;
  std::uint64_t norm_relu = 0;
  std::uint64_t pooling = 0;
  std::uint64_t heads = 0;
  std::uint64_t total() const { return conv + norm_relu + pooling + heads; }
};

OperationCount operation_count(const DeepReceiverConfig& config, int input_length);

/// Parameters plus two buffers of the largest feature map.
std::size_t storage_elements(const DeepReceiverConfig& config, int input_length);

}  // namespace drx::model
