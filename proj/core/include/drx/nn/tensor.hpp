#pragma once

#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace drx::nn {

/// Activations of shape (batch, length, channels), channels fastest.
template <typename T>
struct FeatureMap {
  int batch = 0;
  int length = 0;
  int channels = 0;
  std::vector<T> values;

  FeatureMap() = default;
  FeatureMap(int b, int h, int c, T fill = T(0))
      : batch(b), length(h), channels(c), values(static_cast<std::size_t>(b) * h * c, fill) {}

  std::size_t index(int b, int i, int c) const {
    return (static_cast<std::size_t>(b) * length + i) * channels + c;
  }
  T& at(int b, int i, int c) { return values[index(b, i, c)]; }
  const T& at(int b, int i, int c) const { return values[index(b, i, c)]; }
  T* row(int b, int i) { return values.data() + index(b, i, 0); }
  const T* row(int b, int i) const { return values.data() + index(b, i, 0); }
  std::size_t size() const { return values.size(); }
  bool same_shape(const FeatureMap& o) const {
    return batch == o.batch && length == o.length && channels == o.channels;
  }
};

/// Trainable tensor with its gradient accumulator.
template <typename T>
struct Param {
  std::string name;
  std::vector<int> shape;
  std::vector<T> value;
  std::vector<T> grad;

  Param() = default;
  Param(std::string n, std::vector<int> s) : name(std::move(n)), shape(std::move(s)) {
    const auto count = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                       [](std::size_t a, int d) { return a * static_cast<std::size_t>(d); });
    value.assign(count, T(0));
    grad.assign(count, T(0));
  }
  std::size_t size() const { return value.size(); }
  void zero_grad() { std::fill(grad.begin(), grad.end(), T(0)); }
};

enum class Mode { train, infer };

/// Reduction policy. In deterministic mode weight-gradient partial sums are
/// formed over a fixed number of batch chunks and added in chunk order, so
/// results do not depend on the thread count.
struct RuntimeOptions {
  bool deterministic = true;
  int fixed_chunks = 8;
};

RuntimeOptions& runtime_options();

}  // namespace drx::nn
