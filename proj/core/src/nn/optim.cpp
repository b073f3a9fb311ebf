#include "drx/nn/optim.hpp"

#include <stdexcept>

namespace drx::nn {

template <typename T>
void OptimizerState<T>::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
}

template <typename T>
void sgd_momentum_step(std::span<Param<T>* const> params, OptimizerState<T>& state) {
  state.validate();
  if (state.previous_update.empty()) {
    for (const auto* p : params) state.previous_update.emplace_back(p->size(), T(0));
  }
  if (state.previous_update.size() != params.size())
    throw std::invalid_argument("sgd: parameter list changed between steps");
  const T lr = static_cast<T>(state.learning_rate);
  const T mom = static_cast<T>(state.momentum);
  for (std::size_t t = 0; t < params.size(); ++t) {
    Param<T>& p = *params[t];
    auto& prev = state.previous_update[t];
    if (p.grad.size() != p.value.size() || prev.size() != p.value.size())
      throw std::invalid_argument("sgd: shape mismatch for " + p.name);
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const T delta = -lr * p.grad[j] + mom * prev[j];
      p.value[j] += delta;
      prev[j] = delta;
    }
  }
}

template struct OptimizerState<float>;
template struct OptimizerState<double>;
template void sgd_momentum_step(std::span<Param<float>* const>, OptimizerState<float>&);
template void sgd_momentum_step(std::span<Param<double>* const>, OptimizerState<double>&);

}  // namespace drx::nn
