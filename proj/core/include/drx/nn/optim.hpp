#pragma once

#include <span>
#include <vector>

#include "drx/nn/tensor.hpp"

namespace drx::nn {

/// SGD with momentum in parameter-difference form:
///   w_{t+1} = w_t - lr * grad + momentum * (w_t - w_{t-1}).
template <typename T>
struct OptimizerState {
  double learning_rate = 1e-3;
  double momentum = 0.9;
  std::vector<std::vector<T>> previous_update;  // w_t - w_{t-1} per tensor

  void validate() const;
};

template <typename T>
void sgd_momentum_step(std::span<Param<T>* const> params, OptimizerState<T>& state);

}  // namespace drx::nn
