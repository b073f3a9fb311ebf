#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drx/nn/tensor.hpp"
#include "drx/rng.hpp"

namespace drx::nn {

// ---------------------------------------------------------------------------
// Convolution: same-length output, stride 1, symmetric zero padding (P-1)/2.

template <typename T>
struct ConvLayer {
  Param<T> kernel;  // (P, C_in, K)
  Param<T> bias;    // (K)

  ConvLayer() = default;
  ConvLayer(const std::string& name, int width, int in_channels, int out_channels);

  int width() const { return kernel.shape[0]; }
  int in_channels() const { return kernel.shape[1]; }
  int out_channels() const { return kernel.shape[2]; }

  /// Zero-mean Gaussian weights with std sqrt(2 / (P * C_in)); zero bias.
  void init(Rng& rng);
};

template <typename T>
FeatureMap<T> conv1d_forward(const FeatureMap<T>& x, const ConvLayer<T>& layer);

template <typename T>
struct ConvGrads {
  FeatureMap<T> grad_x;
  std::vector<T> grad_kernel;
  std::vector<T> grad_bias;
};

template <typename T>
ConvGrads<T> conv1d_backward(const FeatureMap<T>& x, const ConvLayer<T>& layer,
                             const FeatureMap<T>& grad_out);

// ---------------------------------------------------------------------------
// Batch normalization over (batch x length) per channel.

template <typename T>
struct BatchNormState {
  Param<T> scale;   // sigma_l, initialised to 1
  Param<T> offset;  // mu_l, initialised to 0
  std::vector<T> running_mean;
  std::vector<T> running_var;
  double epsilon = 1e-5;
  double momentum_ema = 0.9;  // running = m * running + (1 - m) * batch

  BatchNormState() = default;
  BatchNormState(const std::string& name, int channels);
  int channels() const { return static_cast<int>(running_mean.size()); }
};

template <typename T>
struct BatchNormCache {
  std::vector<T> xhat;
  std::vector<T> inv_std;  // per channel
};

/// Train mode normalizes with batch statistics and updates the running
/// statistics (unbiased variance); infer mode uses the running statistics.
template <typename T>
FeatureMap<T> batchnorm_forward(const FeatureMap<T>& x, BatchNormState<T>& state, Mode mode,
                                BatchNormCache<T>* cache = nullptr);

/// Normalization with the running statistics; leaves `state` untouched.
template <typename T>
FeatureMap<T> batchnorm_infer(const FeatureMap<T>& x, const BatchNormState<T>& state);

/// Backward of a train-mode forward. Returns grad_x, writes scale/offset grads.
template <typename T>
FeatureMap<T> batchnorm_backward(const FeatureMap<T>& grad_out, const BatchNormState<T>& state,
                                 const BatchNormCache<T>& cache, std::vector<T>& grad_scale,
                                 std::vector<T>& grad_offset);

// ---------------------------------------------------------------------------

template <typename T>
FeatureMap<T> relu_forward(const FeatureMap<T>& x);

/// Gradient passes where the forward input was strictly positive.
template <typename T>
FeatureMap<T> relu_backward(const FeatureMap<T>& x, const FeatureMap<T>& grad_out);

/// Window 3, stride 2, pad 1 (padding never wins). Output length ceil(H/2).
/// `argmax` receives the winning input position per output element; ties go
/// to the earliest position.
template <typename T>
FeatureMap<T> maxpool_3s2_forward(const FeatureMap<T>& x, std::vector<int>* argmax = nullptr);

template <typename T>
FeatureMap<T> maxpool_3s2_backward(const FeatureMap<T>& grad_out, const std::vector<int>& argmax,
                                   int input_length);

/// Channel-wise concatenation in input order.
template <typename T>
FeatureMap<T> dense_concat(std::span<const FeatureMap<T>* const> inputs);

template <typename T>
FeatureMap<T> dense_concat(const std::vector<FeatureMap<T>>& inputs);

/// Splits along channels at the given widths (inverse of dense_concat).
template <typename T>
std::vector<FeatureMap<T>> split_channels(const FeatureMap<T>& x, std::span<const int> widths);

/// [max over length ; mean over length] per channel -> shape (B, 1, 2C).
template <typename T>
FeatureMap<T> global_pool_forward(const FeatureMap<T>& x, std::vector<int>* argmax = nullptr);

template <typename T>
FeatureMap<T> global_pool_backward(const FeatureMap<T>& grad_out, const std::vector<int>& argmax,
                                   int input_length);

// ---------------------------------------------------------------------------
// M binary softmax heads sharing one feature vector.

template <typename T>
struct HeadsLayer {
  Param<T> weight;  // (M, 2, F)
  Param<T> bias;    // (M, 2)

  HeadsLayer() = default;
  HeadsLayer(const std::string& name, int heads, int features);
  int heads() const { return weight.shape[0]; }
  int features() const { return weight.shape[2]; }
  void init(Rng& rng);
};

template <typename T>
struct HeadsResult {
  double loss = 0.0;                // mean over batch of summed per-head cross-entropy
  std::vector<T> probabilities;     // (B, M, 2)
  FeatureMap<T> grad_features;      // (B, 1, F), empty unless requested
};

/// Softmax per head and cross-entropy against one-hot labels (bit 0 ->
/// [1, 0], bit 1 -> [0, 1]). `labels` holds B*M bits; pass an empty span for
/// inference. With `accumulate_grads`, head gradients are added into the
/// layer's Param::grad and grad_features is filled.
template <typename T>
HeadsResult<T> softmax_xent_heads(const FeatureMap<T>& features, HeadsLayer<T>& heads,
                                  std::span<const std::uint8_t> labels, bool accumulate_grads);

}  // namespace drx::nn
