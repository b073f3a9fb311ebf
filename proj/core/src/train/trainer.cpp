#include "drx/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "drx/errors.hpp"
#include "drx/nn/optim.hpp"
#include "drx/rng.hpp"

namespace drx::train {

double TrainConfig::learning_rate(int epoch) const {
  return initial_lr * std::pow(lr_decay, epoch / decay_interval_epochs);
}

void TrainConfig::validate() const {
  if (minibatch < 1) throw std::invalid_argument("minibatch must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (!(initial_lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw std::invalid_argument("lr_decay must be in (0, 1]");
  if (decay_interval_epochs < 1) throw std::invalid_argument("decay interval must be >= 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must be in [0, 1)");
}

std::vector<std::vector<std::size_t>> epoch_batches(const Dataset& data, const TrainConfig& config, int epoch) {
  std::map<int, std::vector<std::size_t>> by_length;
  for (std::size_t i = 0; i < data.records.size(); ++i) by_length[data.records[i].length()].push_back(i);

  Rng rng(derive_seed(derive_seed(config.seed, 0x7472'6169'6eULL), static_cast<std::uint64_t>(epoch)));
  std::vector<std::vector<std::size_t>> batches;
  for (auto& [len, idx] : by_length) {
    if (config.with_replacement) {
      std::uniform_int_distribution<std::size_t> pick(0, idx.size() - 1);
      std::vector<std::size_t> drawn(idx.size());
      for (auto& d : drawn) d = idx[pick(rng)];
      idx = std::move(drawn);
    } else {
      std::shuffle(idx.begin(), idx.end(), rng);
    }
    for (std::size_t s = 0; s < idx.size(); s += config.minibatch) {
      const auto e = std::min(idx.size(), s + static_cast<std::size_t>(config.minibatch));
      batches.emplace_back(idx.begin() + static_cast<std::ptrdiff_t>(s), idx.begin() + static_cast<std::ptrdiff_t>(e));
    }
  }
  std::shuffle(batches.begin(), batches.end(), rng);
  return batches;
}

TrainResult train(const Dataset& data, const TrainConfig& config, model::DeepReceiver<float>& model,
                  const std::function<void(const LossPoint&)>& on_step) {
  config.validate();
  if (data.records.empty()) throw std::invalid_argument("train: empty dataset");
  for (const auto& r : data.records)
    if (r.num_bits() != model.num_bits())
      throw std::invalid_argument("train: dataset has " + std::to_string(r.num_bits()) + " label bits, model has " +
                                  std::to_string(model.num_bits()) + " heads");

  nn::runtime_options().deterministic = config.deterministic;
  const int M = model.num_bits();
  auto params = model.parameters();
  nn::OptimizerState<float> opt;
  opt.momentum = config.momentum;

  TrainResult result;
  double lr = config.initial_lr;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    lr = config.learning_rate(epoch);
    opt.learning_rate = lr;
    for (const auto& batch : epoch_batches(data, config, epoch)) {
      const int B = static_cast<int>(batch.size());
      const int N = data.records[batch[0]].length();
      nn::FeatureMap<float> x(B, N, 2);
      std::vector<std::uint8_t> labels(static_cast<std::size_t>(B) * M);
      for (int b = 0; b < B; ++b) {
        const auto& rec = data.records[batch[b]];
        std::copy(rec.iq.begin(), rec.iq.end(), x.row(b, 0));
        std::copy(rec.labels.begin(), rec.labels.end(), labels.begin() + static_cast<std::ptrdiff_t>(b) * M);
      }
      model.zero_grad();
      const double loss = model.train_loss(x, labels, true);
      if (!std::isfinite(loss))
        throw TrainingDiverged("training loss became non-finite at iteration " + std::to_string(result.iterations));
      nn::sgd_momentum_step<float>(std::span<nn::Param<float>* const>(params), opt);
      LossPoint p{epoch, result.iterations, lr, loss};
      result.trace.push_back(p);
      if (on_step) on_step(p);
      ++result.iterations;
    }
  }

  std::ostringstream lr_text;
  lr_text.precision(17);
  lr_text << lr;
  result.checkpoint = model::make_checkpoint(model, {{"epochs", std::to_string(config.epochs)},
                                                    {"final_lr", lr_text.str()},
                                                    {"iterations", std::to_string(result.iterations)},
                                                    {"train_seed", std::to_string(config.seed)},
                                                    {"dataset_digest", hex_digest(dataset_digest(data))}});
  return result;
}

std::string loss_trace_csv(const std::vector<LossPoint>& trace) {
  std::ostringstream os;
  os.precision(9);
  os << "iteration,epoch,learning_rate,loss\n";
  for (const auto& p : trace) os << p.iteration << ',' << p.epoch << ',' << p.learning_rate << ',' << p.loss << '\n';
  return os.str();
}

}  // namespace drx::train
