#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drx/harness/config_file.hpp"
#include "drx/model/config.hpp"
#include "drx/phy/mcs.hpp"
#include "drx/train/dataset.hpp"
#include "drx/train/trainer.hpp"

namespace drx::harness {

/// Everything one figure's experiment needs, in overridable form.
struct ExperimentPreset {
  std::string name;
  std::string description;
  std::uint64_t seed = 1;

  std::vector<std::string> mcs = {"bpsk-hamming74"};
  int info_bits = 16;
  int prefix_bits = 0;

  std::vector<std::string> train_scenarios = {"awgn"};
  std::vector<double> train_ebn0 = {0, 1, 2, 3, 4, 5, 6, 7, 8};
  std::size_t train_samples = 2500;  // per grid point

  std::vector<std::string> test_scenarios = {"awgn"};
  std::vector<double> test_ebn0;  // default 0:0.5:8
  std::vector<double> test_isr;   // empty: scenario range
  std::size_t test_samples = 1000;

  train::TrainConfig train_config;
  model::WidthScale width_scale{1, 8};
  std::vector<std::string> receivers = {"hard", "ml", "deep"};

  // Sequential evaluation over pinned settings instead of the test grid.
  std::vector<std::string> dynamic_settings;
  std::size_t dynamic_frames = 0;

  std::vector<phy::McsSpec> mcs_specs() const;
  train::DatasetSpec train_spec() const;
  train::DatasetSpec test_spec() const;
  model::DeepReceiverConfig model_config() const;
  std::uint64_t model_seed() const;
  /// train_config with its shuffling seed derived from `seed`.
  train::TrainConfig effective_train_config() const;
  bool needs_model() const;
  void validate() const;

  /// Effective settings as flat config keys (echoed into run manifests).
  ConfigMap to_config() const;
};

std::vector<std::string> preset_names();
ExperimentPreset make_preset(const std::string& name);

/// Overrides preset fields from flat keys (seed, mcs, mcs.info_bits,
/// train.ebn0, train.epochs, test.samples_per_point, model.width_scale,
/// receivers, ...). Unknown keys are rejected.
void apply_config(ExperimentPreset& preset, const ConfigMap& config);

}  // namespace drx::harness
