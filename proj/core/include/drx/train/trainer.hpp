#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "drx/model/checkpoint.hpp"
#include "drx/model/deep_receiver.hpp"
#include "drx/train/dataset.hpp"

namespace drx::train {

struct TrainConfig {
  int minibatch = 256;
  int epochs = 8;
  double initial_lr = 1e-3;
  double lr_decay = 0.1;
  int decay_interval_epochs = 2;
  double momentum = 0.9;
  bool deterministic = true;
  bool with_replacement = false;
  std::uint64_t seed = 1;

  double learning_rate(int epoch) const;
  void validate() const;
};

struct LossPoint {
  int epoch = 0;
  std::int64_t iteration = 0;
  double learning_rate = 0.0;
  double loss = 0.0;
};

struct TrainResult {
  model::ModelCheckpoint checkpoint;
  std::vector<LossPoint> trace;
  std::int64_t iterations = 0;
};

/// Minibatches of `minibatch` records drawn per epoch. Records are grouped by
/// frame length so every batch is a single (B, N, 2) tensor; within a group
/// the order is a fresh permutation each epoch (or sampling with replacement).
std::vector<std::vector<std::size_t>> epoch_batches(const Dataset& data, const TrainConfig& config, int epoch);

/// Runs the full schedule in place on `model`. Throws std::invalid_argument
/// if a record's label count differs from the model's heads, and
/// TrainingDiverged on a non-finite loss.
TrainResult train(const Dataset& data, const TrainConfig& config, model::DeepReceiver<float>& model,
                  const std::function<void(const LossPoint&)>& on_step = {});

std::string loss_trace_csv(const std::vector<LossPoint>& trace);

}  // namespace drx::train
