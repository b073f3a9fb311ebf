#include <numbers>
#include <set>

#include "doctest.h"
#include "drx/errors.hpp"
#include "drx/model/checkpoint.hpp"
#include "drx/phy/pulse.hpp"
#include "drx/rx/matched_filter.hpp"
#include "drx/train/ber.hpp"
#include "drx/train/trainer.hpp"

using namespace drx;
using namespace drx::train;

namespace {

DatasetSpec small_spec(int info_bits, std::vector<double> grid, std::size_t per_point, std::uint64_t seed,
                       const std::string& scenario = "awgn") {
  DatasetSpec s;
  s.scenarios = {{channel::scenario_preset(scenario), 1.0}};
  s.mcs_list = {phy::mcs_by_name("bpsk-hamming74", info_bits)};
  s.ebn0_grid_db = std::move(grid);
  s.samples_per_point = per_point;
  s.master_seed = seed;
  return s;
}

// Independent hard receiver: correlate with the periodized pulse, sign
// decisions, minimum-distance decoding over the 16 Hamming codewords.
std::vector<std::uint8_t> oracle_hard(const phy::IqFrame& f, int info_bits) {
  const int symbols = static_cast<int>(f.size()) / f.oversampling;
  const auto taps = phy::periodic_pulse_taps(symbols, f.oversampling, 0.5, f.timing_offset);
  std::vector<std::uint8_t> coded(symbols);
  for (int k = 0; k < symbols; ++k) {
    double acc = 0.0;
    for (int i = 0; i < static_cast<int>(f.size()); ++i)
      acc += f.samples[i].real() * taps[(i - k * f.oversampling + f.size()) % f.size()];
    coded[k] = acc < 0.0;
  }
  const auto book = phy::codebook(phy::CodeSpec::hamming74());
  std::vector<std::uint8_t> out;
  for (int b = 0; b < info_bits / 4; ++b) {
    int best = 0, best_d = 99;
    for (int c = 0; c < 16; ++c) {
      int d = 0;
      for (int i = 0; i < 7; ++i) d += book[c][i] != coded[b * 7 + i];
      if (d < best_d) best_d = d, best = c;
    }
    out.insert(out.end(), book[best].begin(), book[best].begin() + 4);
  }
  return out;
}

}  // namespace

TEST_CASE("dataset sizes and validation") {
  auto ref = small_spec(32, {0, 1, 2, 3, 4, 5, 6, 7, 8}, 200000, 1);
  CHECK(ref.record_count() == 1'800'000);
  auto isr = small_spec(32, {0, 2}, 10, 1, "tone");
  isr.isr_grid_db = {-20, 0, 20};
  CHECK(isr.points() == 6);
  auto bad = small_spec(32, {}, 10, 1);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = small_spec(32, {1}, 10, 1);
  bad.mcs_list.push_back(phy::mcs_by_name("bpsk-hamming74", 16));
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("record seeds: train and test domains are disjoint and collision free") {
  std::set<std::uint64_t> train_seeds, test_seeds;
  for (std::size_t i = 0; i < 200'000; ++i) {
    train_seeds.insert(record_seed(5, Split::train, i));
    test_seeds.insert(record_seed(5, Split::test, i));
  }
  CHECK(train_seeds.size() == 200'000);
  CHECK(test_seeds.size() == 200'000);
  std::size_t shared = 0;
  for (auto s : test_seeds) shared += train_seeds.count(s);
  CHECK(shared == 0);
}

TEST_CASE("dataset generation is deterministic and round-trips") {
  auto spec = small_spec(16, {2, 6}, 20, 3);
  const auto a = generate_dataset(spec), b = generate_dataset(spec);
  const auto bytes = serialize_dataset(a);
  CHECK(bytes == serialize_dataset(b));
  CHECK(deserialize_dataset(bytes) == a);
  CHECK(a.records.size() == 40);
  CHECK(a.records[0].ebn0_cdb == 200);
  CHECK(a.records[39].ebn0_cdb == 600);
  CHECK(a.records[0].isr_cdb == DatasetRecord::kNoIsr);
  CHECK(a.records[0].length() == 224);
  CHECK(a.records[0].num_bits() == 16);

  const auto path = std::filesystem::temp_directory_path() / "drx_unit.drxd";
  write_dataset(a, path);
  CHECK(read_dataset(path) == a);
  std::filesystem::remove(path);

  auto t = bytes;
  t.resize(t.size() - 3);
  CHECK_THROWS_AS(deserialize_dataset(t), FormatError);
  auto m = bytes;
  m[1] ^= 1;
  CHECK_THROWS_AS(deserialize_dataset(m), FormatError);

  auto other = spec;
  other.master_seed = 4;
  CHECK(other.digest() != spec.digest());
  CHECK(dataset_digest(generate_dataset(other)) != dataset_digest(a));

  const auto noiseless = generate_dataset(small_spec(16, {3}, 2, 1, "noiseless"));
  CHECK(noiseless.records[0].ebn0_cdb == DatasetRecord::kNoNoise);
}

TEST_CASE("batches: permutation by length bucket, reproducible per epoch") {
  auto spec = small_spec(16, {4}, 50, 1);
  auto d = generate_dataset(spec);
  const auto extra = generate_dataset(small_spec(8, {4}, 30, 2));
  d.records.insert(d.records.end(), extra.records.begin(), extra.records.end());
  TrainConfig cfg;
  cfg.minibatch = 16;
  const auto e0 = epoch_batches(d, cfg, 0);
  CHECK(e0 == epoch_batches(d, cfg, 0));
  CHECK(e0 != epoch_batches(d, cfg, 1));
  std::multiset<std::size_t> seen;
  for (const auto& b : e0) {
    CHECK(b.size() <= 16);
    for (auto i : b) {
      seen.insert(i);
      CHECK(d.records[i].length() == d.records[b[0]].length());
    }
  }
  CHECK(seen.size() == d.records.size());
  CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == d.records.size());
}

TEST_CASE("learning-rate schedule") {
  TrainConfig c;
  CHECK(c.learning_rate(0) == doctest::Approx(1e-3));
  CHECK(c.learning_rate(1) == doctest::Approx(1e-3));
  CHECK(c.learning_rate(2) == doctest::Approx(1e-4));
  CHECK(c.learning_rate(7) == doctest::Approx(1e-6));
  c.minibatch = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("memorization of a tiny dataset") {
  const int M = 8;
  const auto data = generate_dataset(small_spec(M, {4}, 64, 21));
  model::DeepReceiver<float> net(model::DeepReceiverConfig::mini(M), 2);
  TrainConfig cfg;
  cfg.minibatch = 16;
  cfg.epochs = 200;
  cfg.initial_lr = 0.005;  // 0.02 oscillates back to chance on this set
  cfg.decay_interval_epochs = 1000;
  const auto r = train::train(data, cfg, net);
  double last = 0.0;
  int n = 0;
  for (const auto& p : r.trace) {
    CHECK(std::isfinite(p.loss));
    if (p.epoch == cfg.epochs - 1) last += p.loss, ++n;
  }
  last /= n;
  CHECK(r.iterations == 200 * 4);
  CHECK(last < 0.01 * M * std::numbers::ln2);
}

TEST_CASE("training is deterministic; errors are typed") {
  const auto data = generate_dataset(small_spec(8, {3, 5}, 24, 8));
  TrainConfig cfg;
  cfg.minibatch = 16;
  cfg.epochs = 2;
  cfg.initial_lr = 0.01;
  model::DeepReceiver<float> a(model::DeepReceiverConfig::mini(8), 4), b(model::DeepReceiverConfig::mini(8), 4);
  const auto ra = train::train(data, cfg, a), rb = train::train(data, cfg, b);
  CHECK(model::serialize_checkpoint(ra.checkpoint) == model::serialize_checkpoint(rb.checkpoint));
  CHECK(loss_trace_csv(ra.trace) == loss_trace_csv(rb.trace));
  CHECK(loss_trace_csv(ra.trace).rfind("iteration,epoch,learning_rate,loss\n", 0) == 0);

  model::DeepReceiver<float> wrong(model::DeepReceiverConfig::mini(16), 4);
  CHECK_THROWS_AS(train::train(data, cfg, wrong), std::invalid_argument);

  cfg.initial_lr = 1e12;
  model::DeepReceiver<float> c(model::DeepReceiverConfig::mini(8), 4);
  CHECK_THROWS_AS(train::train(data, cfg, c), TrainingDiverged);
}

TEST_CASE("evaluation: noiseless is error free, hard chain matches an independent re-simulation") {
  const auto clean = small_spec(16, {0}, 200, 1, "noiseless");
  for (const auto& r : evaluate_ber(clean, {ReceiverUnderTest::classical(rx::ReceiverChain::hard),
                                            ReceiverUnderTest::classical(rx::ReceiverChain::ml)})) {
    CHECK(r.bit_errors == 0);
    CHECK(r.frames == 200);
    CHECK(r.ber == 0.0);
  }

  auto spec = small_spec(32, {4}, 4000, 17);
  spec.split = Split::test;
  const auto recs = evaluate_ber(spec, {ReceiverUnderTest::classical(rx::ReceiverChain::hard)});
  REQUIRE(recs.size() == 1);
  std::uint64_t errors = 0;
  for (std::size_t i = 0; i < spec.record_count(); ++i) {
    const auto s = synthesize(spec, i);
    const auto got = oracle_hard(s.rx, 32);
    for (int b = 0; b < 32; ++b) errors += got[b] != s.info.bits[b];
  }
  CHECK(recs[0].bit_errors == errors);
  CHECK(recs[0].ber == doctest::Approx(static_cast<double>(errors) / (4000.0 * 32)));
  CHECK(recs[0].ci_low <= recs[0].ber);
  CHECK(recs[0].ci_high >= recs[0].ber);
  CHECK(evaluate_ber(spec, {ReceiverUnderTest::classical(rx::ReceiverChain::hard)})[0].bit_errors == errors);
}

TEST_CASE("Wilson interval") {
  const auto [lo, hi] = wilson_interval(50, 1000);
  CHECK(lo == doctest::Approx(0.0381).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.0653).epsilon(1e-3));
  const auto [z0, z1] = wilson_interval(0, 100);
  CHECK(z0 == 0.0);
  CHECK(z1 > 0.0);
}

TEST_CASE("dynamic sequence") {
  const auto mcs = phy::mcs_by_name("bpsk-hamming74", 16, 8);
  std::vector<channel::ChannelScenario> settings;
  for (auto n : {"dynamic1", "dynamic2", "dynamic3", "dynamic4"}) settings.push_back(channel::scenario_preset(n));
  const std::vector<ReceiverUnderTest> rxs{ReceiverUnderTest::classical(rx::ReceiverChain::hard)};
  const auto recs = run_dynamic_sequence(rxs, settings, mcs, 100, 3);
  REQUIRE(recs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(recs[i].scenario == settings[i].name);

  const auto single = run_dynamic_sequence(rxs, {settings[2]}, mcs, 100, 3);
  DatasetSpec spec;
  spec.scenarios = {{settings[2], 1.0}};
  spec.mcs_list = {mcs};
  spec.ebn0_grid_db = {settings[2].ebn0_db};
  spec.samples_per_point = 100;
  spec.master_seed = 3;
  spec.split = Split::test;
  const auto direct = evaluate_ber(spec, rxs);
  REQUIRE(single.size() == 1);
  CHECK(single[0].bit_errors == direct[0].bit_errors);
  CHECK(single[0].frames == direct[0].frames);
}
