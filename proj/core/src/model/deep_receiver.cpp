#include "drx/model/deep_receiver.hpp"

#include <stdexcept>

namespace drx::model {

namespace {

template <typename T>
void add_into(std::vector<T>& dst, const std::vector<T>& src) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
}

template <typename T>
void add_into(nn::FeatureMap<T>& dst, const nn::FeatureMap<T>& src) {
  add_into(dst.values, src.values);
}

template <typename T>
nn::FeatureMap<T> concat_all(const nn::FeatureMap<T>& x0, const std::vector<nn::FeatureMap<T>>& outs) {
  std::vector<const nn::FeatureMap<T>*> parts{&x0};
  for (const auto& o : outs) parts.push_back(&o);
  return nn::dense_concat<T>(std::span<const nn::FeatureMap<T>* const>(parts));
}

}  // namespace

template <typename T>
DeepReceiver<T>::DeepReceiver(const DeepReceiverConfig& config, std::uint64_t seed) : config_(config) {
  config_.validate();
  Rng rng(seed);
  const int P = config_.kernel_width;
  const auto& layout = config_.layout;

  int c = config_.scaled(layout.front().widths[0]);
  stem_ = nn::ConvLayer<T>("conv0", P, config_.input_channels, c);
  stem_.init(rng);

  int transition_no = 0, dense_no = 0;
  for (std::size_t i = 1; i + 1 < layout.size(); ++i) {
    const auto& b = layout[i];
    Stage s;
    s.kind = b.kind;
    s.in_channels = c;
    if (b.kind == BlockKind::transition) {
      const std::string name = "transition" + std::to_string(++transition_no);
      Unit u;
      u.name = name;
      u.bn = nn::BatchNormState<T>(name + ".bn", c);
      u.pool = true;
      c = config_.scaled(b.widths[0]);
      u.conv = nn::ConvLayer<T>(name + ".conv", P, s.in_channels, c);
      u.conv.init(rng);
      s.units.push_back(std::move(u));
    } else {
      const std::string block = "dense" + std::to_string(++dense_no);
      for (std::size_t j = 0; j < b.widths.size(); ++j) {
        const std::string name = block + ".unit" + std::to_string(j);
        Unit u;
        u.name = name;
        u.bn = nn::BatchNormState<T>(name + ".bn", c);
        const int k = config_.scaled(b.widths[j]);
        u.conv = nn::ConvLayer<T>(name + ".conv", P, c, k);
        u.conv.init(rng);
        c += k;
        s.units.push_back(std::move(u));
      }
    }
    stages_.push_back(std::move(s));
  }

  const int final_c = config_.final_channels();
  head_conv_ = nn::ConvLayer<T>("conv_out", P, c, final_c);
  head_conv_.init(rng);
  heads_ = nn::HeadsLayer<T>("heads", config_.num_bits, 2 * final_c);
  heads_.init(rng);
}

template <typename T>
void DeepReceiver<T>::check_input(const nn::FeatureMap<T>& input) const {
  if (input.batch < 1) throw std::invalid_argument("deep receiver: empty batch");
  if (input.channels != config_.input_channels) throw std::invalid_argument("deep receiver: input channel mismatch");
  if (input.length < config_.min_input_length())
    throw std::invalid_argument("deep receiver: input length " + std::to_string(input.length) + " below minimum " +
                                std::to_string(config_.min_input_length()));
}

// --- units -----------------------------------------------------------------

template <typename T>
nn::FeatureMap<T> DeepReceiver<T>::unit_forward(Unit& u, const nn::FeatureMap<T>& x, bool train) const {
  if (!train) return unit_infer(u, x);
  u.in_length = x.length;
  u.bn_out = nn::batchnorm_forward(x, u.bn, nn::Mode::train, &u.bn_cache);
  auto r = nn::relu_forward(u.bn_out);
  u.conv_in = u.pool ? nn::maxpool_3s2_forward(r, &u.pool_argmax) : std::move(r);
  return nn::conv1d_forward(u.conv_in, u.conv);
}

template <typename T>
nn::FeatureMap<T> DeepReceiver<T>::unit_infer(const Unit& u, const nn::FeatureMap<T>& x) const {
  auto r = nn::relu_forward(nn::batchnorm_infer(x, u.bn));
  if (u.pool) r = nn::maxpool_3s2_forward(r);
  return nn::conv1d_forward(r, u.conv);
}

template <typename T>
nn::FeatureMap<T> DeepReceiver<T>::unit_backward(Unit& u, const nn::FeatureMap<T>& grad_out) {
  auto cg = nn::conv1d_backward(u.conv_in, u.conv, grad_out);
  add_into(u.conv.kernel.grad, cg.grad_kernel);
  add_into(u.conv.bias.grad, cg.grad_bias);
  auto g = std::move(cg.grad_x);
  if (u.pool) g = nn::maxpool_3s2_backward(g, u.pool_argmax, u.in_length);
  g = nn::relu_backward(u.bn_out, g);
  std::vector<T> gs, go;
  g = nn::batchnorm_backward(g, u.bn, u.bn_cache, gs, go);
  add_into(u.bn.scale.grad, gs);
  add_into(u.bn.offset.grad, go);
  return g;
}

// --- stages ----------------------------------------------------------------

template <typename T>
nn::FeatureMap<T> DeepReceiver<T>::stage_forward(Stage& s, const nn::FeatureMap<T>& x, bool train) {
  if (s.kind == BlockKind::transition) return unit_forward(s.units[0], x, train);
  std::vector<nn::FeatureMap<T>> outs;
  for (auto& u : s.units) {
    const auto in = outs.empty() ? x : concat_all(x, outs);
    outs.push_back(unit_forward(u, in, train));
  }
  return concat_all(x, outs);
}

template <typename T>
nn::FeatureMap<T> DeepReceiver<T>::stage_infer(const Stage& s, const nn::FeatureMap<T>& x) const {
  if (s.kind == BlockKind::transition) return unit_infer(s.units[0], x);
  std::vector<nn::FeatureMap<T>> outs;
  for (const auto& u : s.units) {
    const auto in = outs.empty() ? x : concat_all(x, outs);
    outs.push_back(unit_infer(u, in));
  }
  return concat_all(x, outs);
}

template <typename T>
nn::FeatureMap<T> DeepReceiver<T>::stage_backward(Stage& s, const nn::FeatureMap<T>& grad_out) {
  if (s.kind == BlockKind::transition) return unit_backward(s.units[0], grad_out);
  std::vector<int> widths{s.in_channels};
  for (const auto& u : s.units) widths.push_back(u.conv.out_channels());
  auto parts = nn::split_channels(grad_out, std::span<const int>(widths));
  for (std::size_t j = s.units.size(); j-- > 0;) {
    const auto g_in = unit_backward(s.units[j], parts[j + 1]);
    if (j == 0) {
      add_into(parts[0], g_in);
      continue;
    }
    const auto sub = nn::split_channels(g_in, std::span<const int>(widths.data(), j + 1));
    for (std::size_t k = 0; k <= j; ++k) add_into(parts[k], sub[k]);
  }
  return std::move(parts[0]);
}

// --- whole network -----------------------------------------------------------

template <typename T>
nn::FeatureMap<T> DeepReceiver<T>::features(const nn::FeatureMap<T>& input) const {
  check_input(input);
  auto y = nn::conv1d_forward(input, stem_);
  for (const auto& s : stages_) y = stage_infer(s, y);
  return nn::global_pool_forward(nn::conv1d_forward(y, head_conv_));
}

template <typename T>
std::vector<T> DeepReceiver<T>::predict(const nn::FeatureMap<T>& input) const {
  auto heads = heads_;  // softmax_xent_heads only writes grads, and only when asked
  return nn::softmax_xent_heads(features(input), heads, {}, false).probabilities;
}

template <typename T>
double DeepReceiver<T>::eval_loss(const nn::FeatureMap<T>& input, std::span<const std::uint8_t> labels) const {
  auto heads = heads_;
  return nn::softmax_xent_heads(features(input), heads, labels, false).loss;
}

template <typename T>
double DeepReceiver<T>::train_loss(const nn::FeatureMap<T>& input, std::span<const std::uint8_t> labels,
                                   bool backward) {
  check_input(input);
  if (labels.size() != static_cast<std::size_t>(input.batch) * config_.num_bits)
    throw std::invalid_argument("deep receiver: expected " + std::to_string(config_.num_bits) + " labels per item");
  stem_in_ = input;
  auto y = nn::conv1d_forward(stem_in_, stem_);
  for (auto& s : stages_) y = stage_forward(s, y, true);
  head_conv_in_ = std::move(y);
  const auto z = nn::conv1d_forward(head_conv_in_, head_conv_);
  gpool_length_ = z.length;
  const auto f = nn::global_pool_forward(z, &gpool_argmax_);
  auto res = nn::softmax_xent_heads(f, heads_, labels, backward);
  if (!backward) return res.loss;

  auto g = nn::global_pool_backward(res.grad_features, gpool_argmax_, gpool_length_);
  auto cg = nn::conv1d_backward(head_conv_in_, head_conv_, g);
  add_into(head_conv_.kernel.grad, cg.grad_kernel);
  add_into(head_conv_.bias.grad, cg.grad_bias);
  g = std::move(cg.grad_x);
  for (std::size_t i = stages_.size(); i-- > 0;) g = stage_backward(stages_[i], g);
  cg = nn::conv1d_backward(stem_in_, stem_, g);
  add_into(stem_.kernel.grad, cg.grad_kernel);
  add_into(stem_.bias.grad, cg.grad_bias);
  return res.loss;
}

template <typename T>
std::vector<nn::Param<T>*> DeepReceiver<T>::parameters() {
  std::vector<nn::Param<T>*> out{&stem_.kernel, &stem_.bias};
  for (auto& s : stages_)
    for (auto& u : s.units) {
      out.push_back(&u.bn.scale);
      out.push_back(&u.bn.offset);
      out.push_back(&u.conv.kernel);
      out.push_back(&u.conv.bias);
    }
  out.push_back(&head_conv_.kernel);
  out.push_back(&head_conv_.bias);
  out.push_back(&heads_.weight);
  out.push_back(&heads_.bias);
  return out;
}

template <typename T>
std::vector<const nn::Param<T>*> DeepReceiver<T>::parameters() const {
  auto mut = const_cast<DeepReceiver*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

template <typename T>
std::vector<NamedBuffer<T>> DeepReceiver<T>::buffers() {
  std::vector<NamedBuffer<T>> out;
  for (auto& s : stages_)
    for (auto& u : s.units) {
      out.push_back({u.name + ".bn.running_mean", &u.bn.running_mean});
      out.push_back({u.name + ".bn.running_var", &u.bn.running_var});
    }
  return out;
}

template <typename T>
void DeepReceiver<T>::zero_grad() {
  for (auto* p : parameters()) p->zero_grad();
}

template <typename T>
nn::FeatureMap<T> frames_to_input(std::span<const phy::IqFrame> frames) {
  if (frames.empty()) throw std::invalid_argument("frames_to_input: no frames");
  const int n = static_cast<int>(frames[0].size());
  nn::FeatureMap<T> x(static_cast<int>(frames.size()), n, 2);
  for (std::size_t b = 0; b < frames.size(); ++b) {
    if (static_cast<int>(frames[b].size()) != n) throw std::invalid_argument("frames_to_input: unequal frame lengths");
    for (int i = 0; i < n; ++i) {
      x.at(static_cast<int>(b), i, 0) = static_cast<T>(frames[b].samples[i].real());
      x.at(static_cast<int>(b), i, 1) = static_cast<T>(frames[b].samples[i].imag());
    }
  }
  return x;
}

namespace {
template <typename T>
phy::BitStream decide(std::span<const T> p) {
  if (p.size() % 2 != 0) throw std::invalid_argument("decide_bits: probabilities come in pairs");
  std::vector<std::uint8_t> bits(p.size() / 2);
  for (std::size_t m = 0; m < bits.size(); ++m) bits[m] = p[2 * m] > p[2 * m + 1] ? 0 : 1;
  return phy::BitStream(std::move(bits));
}
}  // namespace

phy::BitStream decide_bits(std::span<const float> probs_m2) { return decide(probs_m2); }
phy::BitStream decide_bits(std::span<const double> probs_m2) { return decide(probs_m2); }

template <typename T>
phy::BitStream infer_bits(const DeepReceiver<T>& model, const phy::IqFrame& frame) {
  const auto probs = model.predict(frames_to_input<T>(std::span<const phy::IqFrame>(&frame, 1)));
  return decide_bits(std::span<const T>(probs));
}

template class DeepReceiver<float>;
template class DeepReceiver<double>;
template nn::FeatureMap<float> frames_to_input(std::span<const phy::IqFrame>);
template nn::FeatureMap<double> frames_to_input(std::span<const phy::IqFrame>);
template phy::BitStream infer_bits(const DeepReceiver<float>&, const phy::IqFrame&);
template phy::BitStream infer_bits(const DeepReceiver<double>&, const phy::IqFrame&);

}  // namespace drx::model
