#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "drx/model/config.hpp"
#include "drx/nn/layers.hpp"
#include "drx/phy/bits.hpp"
#include "drx/phy/iq_frame.hpp"

namespace drx::model {

/// Non-trainable tensor (BN running statistics).
template <typename T>
struct NamedBuffer {
  std::string name;
  std::vector<T>* values;
};

/// 1D-Conv-DenseNet with M binary softmax heads.
///
/// Input is (batch, N, 2) with channel 0 = I and channel 1 = Q. Output is
/// (batch, M, 2) probabilities [p(bit=0), p(bit=1)] per head.
template <typename T>
class DeepReceiver {
 public:
  DeepReceiver(const DeepReceiverConfig& config, std::uint64_t seed);

  const DeepReceiverConfig& config() const { return config_; }
  int num_bits() const { return config_.num_bits; }

  /// Pooled feature vectors (batch, 1, F). Read-only on the model.
  nn::FeatureMap<T> features(const nn::FeatureMap<T>& input) const;

  /// Head probabilities using running BN statistics.
  std::vector<T> predict(const nn::FeatureMap<T>& input) const;

  /// Train-mode forward: batch BN statistics (running stats updated), loss
  /// averaged over the batch and summed over heads. With `backward`, the
  /// gradient of that loss is added to every Param::grad.
  double train_loss(const nn::FeatureMap<T>& input, std::span<const std::uint8_t> labels, bool backward);

  /// Loss with running statistics and no side effects.
  double eval_loss(const nn::FeatureMap<T>& input, std::span<const std::uint8_t> labels) const;

  std::vector<nn::Param<T>*> parameters();
  std::vector<const nn::Param<T>*> parameters() const;
  std::vector<NamedBuffer<T>> buffers();
  void zero_grad();

 private:
  struct Unit {  // BN -> ReLU -> [MaxPool] -> Conv
    std::string name;
    nn::BatchNormState<T> bn;
    bool pool = false;
    nn::ConvLayer<T> conv;
    // train-mode caches
    nn::BatchNormCache<T> bn_cache;
    nn::FeatureMap<T> bn_out;
    std::vector<int> pool_argmax;
    nn::FeatureMap<T> conv_in;
    int in_length = 0;
  };
  struct Stage {
    BlockKind kind;
    std::vector<Unit> units;
    int in_channels = 0;
  };

  nn::FeatureMap<T> unit_forward(Unit& u, const nn::FeatureMap<T>& x, bool train) const;
  nn::FeatureMap<T> unit_infer(const Unit& u, const nn::FeatureMap<T>& x) const;
  nn::FeatureMap<T> unit_backward(Unit& u, const nn::FeatureMap<T>& grad_out);
  nn::FeatureMap<T> stage_forward(Stage& s, const nn::FeatureMap<T>& x, bool train);
  nn::FeatureMap<T> stage_infer(const Stage& s, const nn::FeatureMap<T>& x) const;
  nn::FeatureMap<T> stage_backward(Stage& s, const nn::FeatureMap<T>& grad_out);
  void check_input(const nn::FeatureMap<T>& input) const;

  DeepReceiverConfig config_;
  nn::ConvLayer<T> stem_;
  std::vector<Stage> stages_;
  nn::ConvLayer<T> head_conv_;
  nn::HeadsLayer<T> heads_;

  // train-mode caches
  nn::FeatureMap<T> stem_in_;
  nn::FeatureMap<T> head_conv_in_;
  std::vector<int> gpool_argmax_;
  int gpool_length_ = 0;
};

/// Stacks equal-length frames into a (batch, N, 2) input.
template <typename T>
nn::FeatureMap<T> frames_to_input(std::span<const phy::IqFrame> frames);

/// Bit m is 0 iff p(bit=0) > p(bit=1); ties give 1.
phy::BitStream decide_bits(std::span<const float> probs_m2);
phy::BitStream decide_bits(std::span<const double> probs_m2);

/// Single-frame inference.
template <typename T>
phy::BitStream infer_bits(const DeepReceiver<T>& model, const phy::IqFrame& frame);

}  // namespace drx::model
