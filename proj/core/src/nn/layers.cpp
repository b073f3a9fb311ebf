#include "drx/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace drx::nn {

RuntimeOptions& runtime_options() {
  static RuntimeOptions options;
  return options;
}

namespace {

int reduction_chunks(int batch) {
  const auto& opt = runtime_options();
  int chunks = opt.fixed_chunks;
#ifdef _OPENMP
  if (!opt.deterministic) chunks = omp_get_max_threads();
#endif
  return std::clamp(chunks, 1, std::max(batch, 1));
}

template <typename T>
void require_shape(const FeatureMap<T>& a, const FeatureMap<T>& b, const char* what) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

}  // namespace

// ---------------------------------------------------------------------------

template <typename T>
ConvLayer<T>::ConvLayer(const std::string& name, int width, int in_channels, int out_channels)
    : kernel(name + ".kernel", {width, in_channels, out_channels}), bias(name + ".bias", {out_channels}) {
  if (width < 1 || width % 2 == 0) throw std::invalid_argument("conv kernel width must be odd");
  if (in_channels < 1 || out_channels < 1) throw std::invalid_argument("conv channels must be >= 1");
}

template <typename T>
void ConvLayer<T>::init(Rng& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (width() * in_channels())));
  for (auto& w : kernel.value) w = static_cast<T>(dist(rng));
  std::fill(bias.value.begin(), bias.value.end(), T(0));
}

template <typename T>
FeatureMap<T> conv1d_forward(const FeatureMap<T>& x, const ConvLayer<T>& layer) {
  const int P = layer.width(), Cin = layer.in_channels(), K = layer.out_channels();
  if (x.channels != Cin) throw std::invalid_argument("conv1d_forward: channel mismatch");
  const int H = x.length, pad = (P - 1) / 2;
  FeatureMap<T> y(x.batch, H, K);
  const T* W = layer.kernel.value.data();
  const T* bias = layer.bias.value.data();
#pragma omp parallel for schedule(static)
  for (int b = 0; b < x.batch; ++b) {
    for (int i = 0; i < H; ++i) {
      T* out = y.row(b, i);
      std::copy(bias, bias + K, out);
      for (int p = 0; p < P; ++p) {
        const int src = i + p - pad;
        if (src < 0 || src >= H) continue;
        const T* in = x.row(b, src);
        const T* wp = W + static_cast<std::size_t>(p) * Cin * K;
        for (int c = 0; c < Cin; ++c) {
          const T v = in[c];
          const T* w = wp + static_cast<std::size_t>(c) * K;
          for (int k = 0; k < K; ++k) out[k] += v * w[k];
        }
      }
    }
  }
  return y;
}

template <typename T>
ConvGrads<T> conv1d_backward(const FeatureMap<T>& x, const ConvLayer<T>& layer, const FeatureMap<T>& grad_out) {
  const int P = layer.width(), Cin = layer.in_channels(), K = layer.out_channels();
  if (x.channels != Cin || grad_out.channels != K || grad_out.batch != x.batch || grad_out.length != x.length)
    throw std::invalid_argument("conv1d_backward: shape mismatch");
  const int B = x.batch, H = x.length, pad = (P - 1) / 2;
  const std::size_t wsize = layer.kernel.size();
  const T* W = layer.kernel.value.data();

  ConvGrads<T> g;
  g.grad_x = FeatureMap<T>(B, H, Cin);

#pragma omp parallel for schedule(static)
  for (int b = 0; b < B; ++b) {
    for (int i = 0; i < H; ++i) {
      const T* gy = grad_out.row(b, i);
      for (int p = 0; p < P; ++p) {
        const int dst = i + p - pad;
        if (dst < 0 || dst >= H) continue;
        T* gx = g.grad_x.row(b, dst);
        const T* wp = W + static_cast<std::size_t>(p) * Cin * K;
        for (int c = 0; c < Cin; ++c) {
          const T* w = wp + static_cast<std::size_t>(c) * K;
          T acc = 0;
          for (int k = 0; k < K; ++k) acc += w[k] * gy[k];
          gx[c] += acc;
        }
      }
    }
  }

  // Weight and bias gradients: per-chunk partial sums, combined in chunk order.
  const int chunks = reduction_chunks(B);
  std::vector<std::vector<T>> part_w(chunks, std::vector<T>(wsize, T(0)));
  std::vector<std::vector<T>> part_b(chunks, std::vector<T>(K, T(0)));
#pragma omp parallel for schedule(static)
  for (int ch = 0; ch < chunks; ++ch) {
    const int b0 = static_cast<int>(static_cast<long long>(B) * ch / chunks);
    const int b1 = static_cast<int>(static_cast<long long>(B) * (ch + 1) / chunks);
    T* gw = part_w[ch].data();
    T* gb = part_b[ch].data();
    for (int b = b0; b < b1; ++b) {
      for (int i = 0; i < H; ++i) {
        const T* gy = grad_out.row(b, i);
        for (int k = 0; k < K; ++k) gb[k] += gy[k];
        for (int p = 0; p < P; ++p) {
          const int src = i + p - pad;
          if (src < 0 || src >= H) continue;
          const T* in = x.row(b, src);
          T* gwp = gw + static_cast<std::size_t>(p) * Cin * K;
          for (int c = 0; c < Cin; ++c) {
            const T v = in[c];
            T* dst = gwp + static_cast<std::size_t>(c) * K;
            for (int k = 0; k < K; ++k) dst[k] += v * gy[k];
          }
        }
      }
    }
  }
  g.grad_kernel = std::move(part_w[0]);
  g.grad_bias = std::move(part_b[0]);
  for (int ch = 1; ch < chunks; ++ch) {
    for (std::size_t j = 0; j < wsize; ++j) g.grad_kernel[j] += part_w[ch][j];
    for (int k = 0; k < K; ++k) g.grad_bias[k] += part_b[ch][k];
  }
  return g;
}

// ---------------------------------------------------------------------------

template <typename T>
BatchNormState<T>::BatchNormState(const std::string& name, int channels)
    : scale(name + ".scale", {channels}),
      offset(name + ".offset", {channels}),
      running_mean(channels, T(0)),
      running_var(channels, T(1)) {
  if (channels < 1) throw std::invalid_argument("batchnorm channels must be >= 1");
  std::fill(scale.value.begin(), scale.value.end(), T(1));
}

template <typename T>
FeatureMap<T> batchnorm_forward(const FeatureMap<T>& x, BatchNormState<T>& state, Mode mode,
                                BatchNormCache<T>* cache) {
  const int C = x.channels;
  if (C != state.channels()) throw std::invalid_argument("batchnorm: channel mismatch");
  if (!(state.epsilon > 0.0)) throw std::invalid_argument("batchnorm: epsilon must be positive");
  const std::size_t n = static_cast<std::size_t>(x.batch) * x.length;
  FeatureMap<T> y(x.batch, x.length, C);
  std::vector<double> mean(C, 0.0), inv_std(C, 0.0);

  if (mode == Mode::train) {
    if (n < 2) throw std::invalid_argument("batchnorm: train mode needs batch*length >= 2");
    std::vector<double> var(C, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
      const T* row = x.values.data() + r * C;
      for (int c = 0; c < C; ++c) mean[c] += row[c];
    }
    for (int c = 0; c < C; ++c) mean[c] /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) {
      const T* row = x.values.data() + r * C;
      for (int c = 0; c < C; ++c) {
        const double d = row[c] - mean[c];
        var[c] += d * d;
      }
    }
    const double m = state.momentum_ema;
    for (int c = 0; c < C; ++c) {
      const double biased = var[c] / static_cast<double>(n);
      inv_std[c] = 1.0 / std::sqrt(biased + state.epsilon);
      const double unbiased = var[c] / static_cast<double>(n - 1);
      state.running_mean[c] = static_cast<T>(m * state.running_mean[c] + (1.0 - m) * mean[c]);
      state.running_var[c] = static_cast<T>(m * state.running_var[c] + (1.0 - m) * unbiased);
    }
  } else {
    for (int c = 0; c < C; ++c) {
      mean[c] = state.running_mean[c];
      inv_std[c] = 1.0 / std::sqrt(std::max<double>(state.running_var[c], 0.0) + state.epsilon);
    }
  }

  if (cache) {
    cache->xhat.resize(x.size());
    cache->inv_std.assign(inv_std.begin(), inv_std.end());
  }
  const T* sc = state.scale.value.data();
  const T* of = state.offset.value.data();
  for (std::size_t r = 0; r < n; ++r) {
    const T* in = x.values.data() + r * C;
    T* out = y.values.data() + r * C;
    for (int c = 0; c < C; ++c) {
      const T xh = static_cast<T>((in[c] - mean[c]) * inv_std[c]);
      if (cache) cache->xhat[r * C + c] = xh;
      out[c] = sc[c] * xh + of[c];
    }
  }
  return y;
}

template <typename T>
FeatureMap<T> batchnorm_infer(const FeatureMap<T>& x, const BatchNormState<T>& state) {
  return batchnorm_forward<T>(x, const_cast<BatchNormState<T>&>(state), Mode::infer, nullptr);
}

template <typename T>
FeatureMap<T> batchnorm_backward(const FeatureMap<T>& grad_out, const BatchNormState<T>& state,
                                 const BatchNormCache<T>& cache, std::vector<T>& grad_scale,
                                 std::vector<T>& grad_offset) {
  const int C = grad_out.channels;
  if (C != state.channels() || cache.xhat.size() != grad_out.size())
    throw std::invalid_argument("batchnorm_backward: shape mismatch");
  const std::size_t n = static_cast<std::size_t>(grad_out.batch) * grad_out.length;
  std::vector<double> sum_g(C, 0.0), sum_gx(C, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const T* gy = grad_out.values.data() + r * C;
    const T* xh = cache.xhat.data() + r * C;
    for (int c = 0; c < C; ++c) {
      sum_g[c] += gy[c];
      sum_gx[c] += static_cast<double>(gy[c]) * xh[c];
    }
  }
  grad_scale.resize(C);
  grad_offset.resize(C);
  std::vector<double> a(C), mg(C), mgx(C);
  for (int c = 0; c < C; ++c) {
    grad_scale[c] = static_cast<T>(sum_gx[c]);
    grad_offset[c] = static_cast<T>(sum_g[c]);
    a[c] = static_cast<double>(state.scale.value[c]) * cache.inv_std[c];
    mg[c] = sum_g[c] / static_cast<double>(n);
    mgx[c] = sum_gx[c] / static_cast<double>(n);
  }
  FeatureMap<T> gx(grad_out.batch, grad_out.length, C);
  for (std::size_t r = 0; r < n; ++r) {
    const T* gy = grad_out.values.data() + r * C;
    const T* xh = cache.xhat.data() + r * C;
    T* out = gx.values.data() + r * C;
    for (int c = 0; c < C; ++c) out[c] = static_cast<T>(a[c] * (gy[c] - mg[c] - xh[c] * mgx[c]));
  }
  return gx;
}

// ---------------------------------------------------------------------------

template <typename T>
FeatureMap<T> relu_forward(const FeatureMap<T>& x) {
  FeatureMap<T> y = x;
  for (auto& v : y.values) v = v > T(0) ? v : T(0);
  return y;
}

template <typename T>
FeatureMap<T> relu_backward(const FeatureMap<T>& x, const FeatureMap<T>& grad_out) {
  require_shape(x, grad_out, "relu_backward");
  FeatureMap<T> g = grad_out;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (!(x.values[j] > T(0))) g.values[j] = T(0);
  return g;
}

template <typename T>
FeatureMap<T> maxpool_3s2_forward(const FeatureMap<T>& x, std::vector<int>* argmax) {
  if (x.length < 1) throw std::invalid_argument("maxpool: empty input");
  const int H = x.length, C = x.channels, Ho = (H + 1) / 2;
  FeatureMap<T> y(x.batch, Ho, C);
  if (argmax) argmax->assign(y.size(), 0);
  for (int b = 0; b < x.batch; ++b) {
    for (int o = 0; o < Ho; ++o) {
      const int lo = std::max(2 * o - 1, 0), hi = std::min(2 * o + 1, H - 1);
      T* out = y.row(b, o);
      for (int c = 0; c < C; ++c) {
        int best = lo;
        T v = x.at(b, lo, c);
        for (int s = lo + 1; s <= hi; ++s) {
          const T cand = x.at(b, s, c);
          if (cand > v) {
            v = cand;
            best = s;
          }
        }
        out[c] = v;
        if (argmax) (*argmax)[y.index(b, o, c)] = best;
      }
    }
  }
  return y;
}

template <typename T>
FeatureMap<T> maxpool_3s2_backward(const FeatureMap<T>& grad_out, const std::vector<int>& argmax, int input_length) {
  if (argmax.size() != grad_out.size() || grad_out.length != (input_length + 1) / 2)
    throw std::invalid_argument("maxpool_backward: shape mismatch");
  FeatureMap<T> gx(grad_out.batch, input_length, grad_out.channels);
  for (int b = 0; b < grad_out.batch; ++b)
    for (int o = 0; o < grad_out.length; ++o)
      for (int c = 0; c < grad_out.channels; ++c) {
        const auto j = grad_out.index(b, o, c);
        gx.at(b, argmax[j], c) += grad_out.values[j];
      }
  return gx;
}

template <typename T>
FeatureMap<T> dense_concat(std::span<const FeatureMap<T>* const> inputs) {
  if (inputs.empty()) throw std::invalid_argument("dense_concat: no inputs");
  const int B = inputs[0]->batch, H = inputs[0]->length;
  int C = 0;
  for (const auto* in : inputs) {
    if (in->batch != B || in->length != H) throw std::invalid_argument("dense_concat: batch/length mismatch");
    C += in->channels;
  }
  FeatureMap<T> y(B, H, C);
  for (int b = 0; b < B; ++b)
    for (int i = 0; i < H; ++i) {
      T* out = y.row(b, i);
      for (const auto* in : inputs) {
        const T* src = in->row(b, i);
        out = std::copy(src, src + in->channels, out);
      }
    }
  return y;
}

template <typename T>
FeatureMap<T> dense_concat(const std::vector<FeatureMap<T>>& inputs) {
  std::vector<const FeatureMap<T>*> ptrs;
  for (const auto& in : inputs) ptrs.push_back(&in);
  return dense_concat<T>(std::span<const FeatureMap<T>* const>(ptrs));
}

template <typename T>
std::vector<FeatureMap<T>> split_channels(const FeatureMap<T>& x, std::span<const int> widths) {
  int total = 0;
  for (int w : widths) {
    if (w < 1) throw std::invalid_argument("split_channels: width must be >= 1");
    total += w;
  }
  if (total != x.channels) throw std::invalid_argument("split_channels: widths do not sum to channel count");
  std::vector<FeatureMap<T>> parts;
  for (int w : widths) parts.emplace_back(x.batch, x.length, w);
  for (int b = 0; b < x.batch; ++b)
    for (int i = 0; i < x.length; ++i) {
      const T* src = x.row(b, i);
      for (std::size_t p = 0; p < parts.size(); ++p) {
        std::copy(src, src + widths[p], parts[p].row(b, i));
        src += widths[p];
      }
    }
  return parts;
}

template <typename T>
FeatureMap<T> global_pool_forward(const FeatureMap<T>& x, std::vector<int>* argmax) {
  if (x.length < 1) throw std::invalid_argument("global_pool: empty input");
  const int C = x.channels;
  FeatureMap<T> y(x.batch, 1, 2 * C);
  if (argmax) argmax->assign(static_cast<std::size_t>(x.batch) * C, 0);
  for (int b = 0; b < x.batch; ++b) {
    T* out = y.row(b, 0);
    for (int c = 0; c < C; ++c) {
      T best = x.at(b, 0, c);
      int where = 0;
      double sum = 0.0;
      for (int i = 0; i < x.length; ++i) {
        const T v = x.at(b, i, c);
        sum += v;
        if (v > best) {
          best = v;
          where = i;
        }
      }
      out[c] = best;
      out[C + c] = static_cast<T>(sum / x.length);
      if (argmax) (*argmax)[static_cast<std::size_t>(b) * C + c] = where;
    }
  }
  return y;
}

template <typename T>
FeatureMap<T> global_pool_backward(const FeatureMap<T>& grad_out, const std::vector<int>& argmax, int input_length) {
  const int C = grad_out.channels / 2;
  if (grad_out.length != 1 || grad_out.channels % 2 != 0 || argmax.size() != static_cast<std::size_t>(grad_out.batch) * C)
    throw std::invalid_argument("global_pool_backward: shape mismatch");
  FeatureMap<T> gx(grad_out.batch, input_length, C);
  const T inv = T(1) / static_cast<T>(input_length);
  for (int b = 0; b < grad_out.batch; ++b) {
    const T* g = grad_out.row(b, 0);
    for (int i = 0; i < input_length; ++i) {
      T* out = gx.row(b, i);
      for (int c = 0; c < C; ++c) out[c] = g[C + c] * inv;
    }
    for (int c = 0; c < C; ++c) gx.at(b, argmax[static_cast<std::size_t>(b) * C + c], c) += g[c];
  }
  return gx;
}

// ---------------------------------------------------------------------------

template <typename T>
HeadsLayer<T>::HeadsLayer(const std::string& name, int heads, int features)
    : weight(name + ".weight", {heads, 2, features}), bias(name + ".bias", {heads, 2}) {
  if (heads < 1 || features < 1) throw std::invalid_argument("heads: sizes must be >= 1");
}

template <typename T>
void HeadsLayer<T>::init(Rng& rng) {
  std::normal_distribution<double> dist(0.0, std::sqrt(1.0 / features()));
  for (auto& w : weight.value) w = static_cast<T>(dist(rng));
  std::fill(bias.value.begin(), bias.value.end(), T(0));
}

template <typename T>
HeadsResult<T> softmax_xent_heads(const FeatureMap<T>& features, HeadsLayer<T>& heads,
                                  std::span<const std::uint8_t> labels, bool accumulate_grads) {
  const int B = features.batch, F = heads.features(), M = heads.heads();
  if (features.length != 1 || features.channels != F) throw std::invalid_argument("heads: feature size mismatch");
  const bool with_labels = !labels.empty();
  if (with_labels && labels.size() != static_cast<std::size_t>(B) * M)
    throw std::invalid_argument("heads: label count mismatch");
  if (accumulate_grads && !with_labels) throw std::invalid_argument("heads: gradients need labels");
  for (auto l : labels)
    if (l > 1) throw std::invalid_argument("heads: labels must be 0 or 1");

  HeadsResult<T> res;
  res.probabilities.assign(static_cast<std::size_t>(B) * M * 2, T(0));
  std::vector<double> dz(static_cast<std::size_t>(B) * M * 2, 0.0);
  const T* W = heads.weight.value.data();
  const T* bias = heads.bias.value.data();
  double loss = 0.0;
  for (int b = 0; b < B; ++b) {
    const T* f = features.row(b, 0);
    for (int m = 0; m < M; ++m) {
      double z[2];
      for (int k = 0; k < 2; ++k) {
        const T* w = W + (static_cast<std::size_t>(m) * 2 + k) * F;
        double acc = bias[m * 2 + k];
        for (int j = 0; j < F; ++j) acc += static_cast<double>(w[j]) * f[j];
        z[k] = acc;
      }
      const double zmax = std::max(z[0], z[1]);
      const double lse = zmax + std::log(std::exp(z[0] - zmax) + std::exp(z[1] - zmax));
      const std::size_t base = (static_cast<std::size_t>(b) * M + m) * 2;
      for (int k = 0; k < 2; ++k) res.probabilities[base + k] = static_cast<T>(std::exp(z[k] - lse));
      if (with_labels) {
        const int truth = labels[static_cast<std::size_t>(b) * M + m];
        loss += lse - z[truth];
        for (int k = 0; k < 2; ++k) dz[base + k] = (std::exp(z[k] - lse) - (k == truth ? 1.0 : 0.0)) / B;
      }
    }
  }
  res.loss = with_labels ? loss / B : 0.0;
  if (!accumulate_grads) return res;

  res.grad_features = FeatureMap<T>(B, 1, F);
  T* gW = heads.weight.grad.data();
  T* gb = heads.bias.grad.data();
  for (int m = 0; m < M; ++m)
    for (int k = 0; k < 2; ++k) {
      T* gw = gW + (static_cast<std::size_t>(m) * 2 + k) * F;
      const T* w = W + (static_cast<std::size_t>(m) * 2 + k) * F;
      double gbias = 0.0;
      for (int b = 0; b < B; ++b) {
        const double d = dz[(static_cast<std::size_t>(b) * M + m) * 2 + k];
        gbias += d;
        const T* f = features.row(b, 0);
        T* gf = res.grad_features.row(b, 0);
        for (int j = 0; j < F; ++j) {
          gw[j] += static_cast<T>(d * f[j]);
          gf[j] += static_cast<T>(d * w[j]);
        }
      }
      gb[m * 2 + k] += static_cast<T>(gbias);
    }
  return res;
}

#define DRX_NN_INSTANTIATE(T)                                                                              \
  template struct ConvLayer<T>;                                                                           \
  template struct BatchNormState<T>;                                                                      \
  template struct HeadsLayer<T>;                                                                          \
  template FeatureMap<T> conv1d_forward(const FeatureMap<T>&, const ConvLayer<T>&);                       \
  template ConvGrads<T> conv1d_backward(const FeatureMap<T>&, const ConvLayer<T>&, const FeatureMap<T>&); \
  template FeatureMap<T> batchnorm_forward(const FeatureMap<T>&, BatchNormState<T>&, Mode,               \
                                           BatchNormCache<T>*);                                            \
  template FeatureMap<T> batchnorm_infer(const FeatureMap<T>&, const BatchNormState<T>&);                 \
  template FeatureMap<T> batchnorm_backward(const FeatureMap<T>&, const BatchNormState<T>&,              \
                                            const BatchNormCache<T>&, std::vector<T>&, std::vector<T>&);  \
  template FeatureMap<T> relu_forward(const FeatureMap<T>&);                                              \
  template FeatureMap<T> relu_backward(const FeatureMap<T>&, const FeatureMap<T>&);                       \
  template FeatureMap<T> maxpool_3s2_forward(const FeatureMap<T>&, std::vector<int>*);                    \
  template FeatureMap<T> maxpool_3s2_backward(const FeatureMap<T>&, const std::vector<int>&, int);        \
  template FeatureMap<T> dense_concat(std::span<const FeatureMap<T>* const>);                             \
  template FeatureMap<T> dense_concat(const std::vector<FeatureMap<T>>&);                                 \
  template std::vector<FeatureMap<T>> split_channels(const FeatureMap<T>&, std::span<const int>);         \
  template FeatureMap<T> global_pool_forward(const FeatureMap<T>&, std::vector<int>*);                    \
  template FeatureMap<T> global_pool_backward(const FeatureMap<T>&, const std::vector<int>&, int);        \
  template HeadsResult<T> softmax_xent_heads(const FeatureMap<T>&, HeadsLayer<T>&,                        \
                                             std::span<const std::uint8_t>, bool);

DRX_NN_INSTANTIATE(float)
DRX_NN_INSTANTIATE(double)

}  // namespace drx::nn
