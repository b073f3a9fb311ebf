#include <benchmark/benchmark.h>

#include <random>

#include "drx/channel/scenario.hpp"
#include "drx/model/deep_receiver.hpp"
#include "drx/phy/mcs.hpp"
#include "drx/rx/receiver.hpp"

using namespace drx;

namespace {

phy::IqFrame received_frame(const phy::McsSpec& mcs, const char* scenario) {
  const auto [tx, info] = phy::build_frame(mcs, phy::generate_info_bits(mcs.info_bits, 1), 2);
  auto sc = channel::scenario_preset(scenario);
  sc.ebn0_db = 6.0;
  sc.pinned_ebn0 = true;
  return channel::propagate(tx, sc, mcs.info_bits, 3);
}

void BM_BuildFrame(benchmark::State& state) {
  const auto mcs = phy::mcs_by_name("bpsk-hamming74", static_cast<int>(state.range(0)));
  const auto info = phy::generate_info_bits(mcs.info_bits, 1);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(phy::build_frame(mcs, info, ++seed));
}
BENCHMARK(BM_BuildFrame)->Arg(16)->Arg(32);

void BM_Propagate(benchmark::State& state) {
  const auto mcs = phy::mcs_by_name("bpsk-hamming74", 32);
  const auto [tx, info] = phy::build_frame(mcs, phy::generate_info_bits(32, 1), 2);
  auto sc = channel::scenario_preset("selective");
  sc.ebn0_db = 6.0;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(channel::propagate(tx, sc, 32, ++seed));
}
BENCHMARK(BM_Propagate);

void BM_ClassicalReceive(benchmark::State& state) {
  const auto chain = static_cast<rx::ReceiverChain>(state.range(0));
  const auto mcs = phy::mcs_by_name("bpsk-hamming74", 16);
  const auto y = received_frame(mcs, "awgn");
  for (auto _ : state) benchmark::DoNotOptimize(rx::classical_receive(y, mcs, chain));
  state.SetLabel(rx::receiver_chain_name(chain));
}
BENCHMARK(BM_ClassicalReceive)
    ->Arg(static_cast<int>(rx::ReceiverChain::hard))
    ->Arg(static_cast<int>(rx::ReceiverChain::ml));

void BM_MiniInference(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  model::DeepReceiver<float> net(model::DeepReceiverConfig::mini(16), 5);
  nn::FeatureMap<float> x(batch, 224, 2);
  std::mt19937 rng(1);
  std::normal_distribution<float> nd;
  for (auto& v : x.values) v = nd(rng);
  for (auto _ : state) benchmark::DoNotOptimize(net.predict(x));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_MiniInference)->Arg(1)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_MiniTrainStep(benchmark::State& state) {
  model::DeepReceiver<float> net(model::DeepReceiverConfig::mini(16), 5);
  nn::FeatureMap<float> x(32, 224, 2);
  std::mt19937 rng(1);
  std::normal_distribution<float> nd;
  for (auto& v : x.values) v = nd(rng);
  std::vector<std::uint8_t> labels(32 * 16);
  for (auto& b : labels) b = rng() & 1;
  for (auto _ : state) {
    net.zero_grad();
    benchmark::DoNotOptimize(net.train_loss(x, labels, true));
  }
}
BENCHMARK(BM_MiniTrainStep)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
