#include "drx/train/ber.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace drx::train {

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  if (errors > trials) throw std::invalid_argument("wilson_interval: errors exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  // The bounds are exact at the edges; the formula leaves rounding residue.
  return {errors == 0 ? 0.0 : std::max(0.0, center - half), errors == trials ? 1.0 : std::min(1.0, center + half)};
}

ReceiverUnderTest ReceiverUnderTest::classical(rx::ReceiverChain chain) {
  return {rx::receiver_chain_name(chain), chain, nullptr};
}

ReceiverUnderTest ReceiverUnderTest::deep(const model::DeepReceiver<float>& model, std::string name) {
  return {std::move(name), std::nullopt, &model};
}

namespace {

std::vector<std::size_t> deep_errors(const model::DeepReceiver<float>& model, const std::vector<FrameSample>& frames) {
  std::vector<std::size_t> errors(frames.size(), 0);
  std::map<std::size_t, std::vector<std::size_t>> by_length;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].info.size() != static_cast<std::size_t>(model.num_bits()))
      throw std::invalid_argument("evaluate_ber: frame carries " + std::to_string(frames[i].info.size()) +
                                  " bits, model has " + std::to_string(model.num_bits()) + " heads");
    by_length[frames[i].rx.size()].push_back(i);
  }
  const int M = model.num_bits();
  for (const auto& [len, idx] : by_length) {
    std::vector<phy::IqFrame> batch;
    for (auto i : idx) batch.push_back(frames[i].rx);
    const auto probs = model.predict(model::frames_to_input<float>(batch));
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const auto bits = model::decide_bits(std::span<const float>(probs.data() + b * 2 * M, 2 * M));
      errors[idx[b]] = phy::count_bit_errors(bits.view(), frames[idx[b]].info.view());
    }
  }
  return errors;
}

}  // namespace

std::vector<BerRecord> evaluate_ber(const DatasetSpec& spec, const std::vector<ReceiverUnderTest>& receivers,
                                    std::size_t block_size) {
  spec.validate();
  if (receivers.empty()) throw std::invalid_argument("evaluate_ber: no receivers");
  for (const auto& r : receivers)
    if (!r.chain && !r.model) throw std::invalid_argument("evaluate_ber: receiver '" + r.name + "' is empty");
  block_size = std::max<std::size_t>(block_size, 1);

  using Key = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;  // point, scenario, mcs, receiver
  struct Tally {
    std::uint64_t frames = 0, errors = 0;
    double ebn0 = 0.0;
    std::optional<double> isr;
  };
  std::map<Key, Tally> tallies;

  const std::size_t total = spec.record_count();
  for (std::size_t start = 0; start < total; start += block_size) {
    const std::size_t end = std::min(total, start + block_size);
    std::vector<FrameSample> frames(end - start);
#pragma omp parallel for schedule(dynamic, 8)
    for (std::size_t i = start; i < end; ++i) frames[i - start] = synthesize(spec, i);

    for (std::size_t r = 0; r < receivers.size(); ++r) {
      const auto& rut = receivers[r];
      std::vector<std::size_t> errors(frames.size(), 0);
      if (rut.model) {
        errors = deep_errors(*rut.model, frames);
      } else {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::size_t f = 0; f < frames.size(); ++f) {
          const auto& s = frames[f];
          const auto bits = rx::classical_receive(s.rx, spec.mcs_list[s.mcs_index], *rut.chain);
          errors[f] = phy::count_bit_errors(bits.view(), s.info.view());
        }
      }
      for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto& s = frames[f];
        auto& t = tallies[{s.index / spec.samples_per_point, s.scenario_index, s.mcs_index, r}];
        t.frames += 1;
        t.errors += errors[f];
        t.ebn0 = s.ebn0_db;
        t.isr = s.isr_db;
      }
    }
  }

  std::vector<BerRecord> out;
  for (const auto& [key, t] : tallies) {
    const auto& [point, si, mi, r] = key;
    const auto& scenario = spec.scenarios[si].scenario;
    const auto& mcs = spec.mcs_list[mi];
    BerRecord rec;
    rec.scenario = scenario.name;
    rec.scenario_id = scenario.id;
    rec.mcs = mcs.name();
    rec.mcs_id = mcs.id;
    rec.ebn0_db = t.ebn0;
    rec.isr_db = t.isr;
    rec.receiver = receivers[r].name;
    rec.frames = t.frames;
    rec.bit_errors = t.errors;
    const std::uint64_t bits = t.frames * static_cast<std::uint64_t>(mcs.info_bits);
    rec.ber = static_cast<double>(t.errors) / static_cast<double>(bits);
    std::tie(rec.ci_low, rec.ci_high) = wilson_interval(t.errors, bits);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<BerRecord> run_dynamic_sequence(const std::vector<ReceiverUnderTest>& receivers,
                                            const std::vector<channel::ChannelScenario>& settings,
                                            const phy::McsSpec& mcs, std::size_t frames_per_setting,
                                            std::uint64_t master_seed) {
  if (settings.empty()) throw std::invalid_argument("run_dynamic_sequence: no settings");
  std::vector<BerRecord> out;
  for (const auto& s : settings) {
    DatasetSpec spec;
    spec.scenarios = {{s, 1.0}};
    spec.mcs_list = {mcs};
    spec.ebn0_grid_db = {s.ebn0_db};
    spec.samples_per_point = frames_per_setting;
    spec.master_seed = master_seed;
    spec.split = Split::test;
    auto recs = evaluate_ber(spec, receivers);
    out.insert(out.end(), recs.begin(), recs.end());
  }
  return out;
}

}  // namespace drx::train
