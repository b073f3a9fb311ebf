#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "drx/model/deep_receiver.hpp"
#include "drx/rx/receiver.hpp"
#include "drx/train/dataset.hpp"

namespace drx::train {

struct BerRecord {
  std::string scenario;
  int scenario_id = 0;
  std::string mcs;
  int mcs_id = 0;
  double ebn0_db = 0.0;
  std::optional<double> isr_db;
  std::string receiver;
  std::uint64_t frames = 0;
  std::uint64_t bit_errors = 0;
  double ber = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

/// Wilson score interval for a binomial proportion (default 95%).
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.959963984540054);

/// Classical chain or trained model.
struct ReceiverUnderTest {
  std::string name;
  std::optional<rx::ReceiverChain> chain;
  const model::DeepReceiver<float>* model = nullptr;

  static ReceiverUnderTest classical(rx::ReceiverChain chain);
  static ReceiverUnderTest deep(const model::DeepReceiver<float>& model, std::string name = "deep");
};

/// Streams the spec's frames through every receiver and counts information
/// bit errors per (point, scenario, MCS, receiver). Use Split::test specs so
/// no frame coincides with a training frame.
std::vector<BerRecord> evaluate_ber(const DatasetSpec& spec, const std::vector<ReceiverUnderTest>& receivers,
                                    std::size_t block_size = 512);

/// Evaluates the same receivers across `settings` in order, each at its own
/// Eb/N0, without telling the receiver which setting is active.
std::vector<BerRecord> run_dynamic_sequence(const std::vector<ReceiverUnderTest>& receivers,
                                            const std::vector<channel::ChannelScenario>& settings,
                                            const phy::McsSpec& mcs, std::size_t frames_per_setting,
                                            std::uint64_t master_seed);

}  // namespace drx::train
