// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--only N]... [--skip N]...
//
// Exit status is nonzero if any selected criterion fails.

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "drx/channel/noise.hpp"
#include "drx/channel/scenario.hpp"
#include "drx/harness/experiment.hpp"
#include "drx/harness/presets.hpp"
#include "drx/harness/verify.hpp"
#include "drx/io/binary.hpp"
#include "drx/model/complexity.hpp"
#include "drx/model/deep_receiver.hpp"
#include "drx/phy/mcs.hpp"
#include "drx/phy/modulation.hpp"
#include "drx/phy/pulse.hpp"
#include "drx/rng.hpp"
#include "drx/rx/decoders.hpp"
#include "drx/rx/receiver.hpp"
#include "drx/train/ber.hpp"
#include "drx/train/trainer.hpp"

using namespace drx;
namespace fs = std::filesystem;
using cd = std::complex<double>;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Upper 95% one-sided bound on p_a - p_b, treating the two estimates as
// independent. Both receivers see the same frames, so errors correlate
// positively and this bound is conservative.
double diff_upper(const train::BerRecord& a, const train::BerRecord& b, int bits_per_frame) {
  const double na = static_cast<double>(a.frames) * bits_per_frame;
  const double nb = static_cast<double>(b.frames) * bits_per_frame;
  const double se = std::sqrt(a.ber * (1 - a.ber) / na + b.ber * (1 - b.ber) / nb);
  return a.ber - b.ber + 1.6448536269514722 * se;
}

const train::BerRecord& find(const std::vector<train::BerRecord>& recs, const std::string& receiver, double ebn0) {
  for (const auto& r : recs)
    if (r.receiver == receiver && std::abs(r.ebn0_db - ebn0) < 1e-9) return r;
  throw std::runtime_error("missing record " + receiver);
}

// ---------------------------------------------------------------------------

Outcome codec_oracle() {
  const auto code = phy::CodeSpec::hamming74();
  int corrected = 0;
  for (const auto& cw : phy::codebook(code))
    for (int e = 0; e < 7; ++e) {
      auto w = cw;
      w[e] ^= 1;
      corrected += rx::hard_decode(code, phy::BitStream(w, phy::BitRole::coded)).bits ==
                   std::vector<std::uint8_t>(cw.begin(), cw.begin() + 4);
    }

  // One Hamming block per frame; the oracle re-synthesizes all 16 candidate
  // waveforms and keeps the closest in the sample domain.
  const auto mcs = phy::mcs_by_name("bpsk-hamming74", 4);
  Rng rng(2024);
  int agree = 0;
  const int blocks = 1000;
  for (int t = 0; t < blocks; ++t) {
    const auto [tx, info] = phy::build_frame(mcs, phy::generate_info_bits(4, rng()), rng());
    const double ebn0 = std::uniform_real_distribution<double>(-2.0, 6.0)(rng);
    const auto y = channel::apply_noise(tx, channel::NoiseSpec::awgn(), ebn0, 4, rng());
    double best = INFINITY;
    std::uint32_t arg = 0;
    for (std::uint32_t v = 0; v < 16; ++v) {
      const phy::BitStream cand({static_cast<std::uint8_t>(v >> 3 & 1), static_cast<std::uint8_t>(v >> 2 & 1),
                                 static_cast<std::uint8_t>(v >> 1 & 1), static_cast<std::uint8_t>(v & 1)});
      const auto sym = phy::modulate(mcs.modulation, phy::frame_bits(mcs, cand));
      const auto x = phy::pulse_shape(sym, mcs, tx.timing_offset).samples;
      double d = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) d += std::norm(y.samples[i] - x[i]);
      if (d < best) best = d, arg = v;
    }
    const auto got = rx::classical_receive(y, mcs, rx::ReceiverChain::ml).bits;
    const std::uint32_t g = got[0] << 3 | got[1] << 2 | got[2] << 1 | got[3];
    agree += g == arg;
  }
  return {corrected == 112 && agree == blocks,
          fmt("single-error corrections %d/112, ML vs waveform oracle %d/%d", corrected, agree, blocks)};
}

Outcome ebn0_calibration() {
  const int symbols = 250, frames = 4000, os = 8;
  std::uint64_t errors = 0;
#pragma omp parallel for schedule(static) reduction(+ : errors)
  for (int f = 0; f < frames; ++f) {
    Rng local(derive_seed(4, static_cast<std::uint64_t>(f)));
    std::vector<cd> s(symbols);
    std::vector<int> b(symbols);
    for (int i = 0; i < symbols; ++i) {
      b[i] = static_cast<int>(local() & 1);
      s[i] = b[i] ? -1.0 : 1.0;
    }
    phy::IqFrame frame;
    frame.timing_offset = std::uniform_real_distribution<double>(0.0, 1.0)(local);
    frame.samples = phy::shape_symbols(s, os, 0.5, frame.timing_offset);
    const auto y = channel::apply_noise(frame, channel::NoiseSpec::awgn(), 4.0, symbols, local());
    const auto z = phy::correlate_symbols(y.samples, os, 0.5, frame.timing_offset);
    for (int i = 0; i < symbols; ++i) errors += (z[i].real() < 0.0) != (b[i] == 1);
  }
  const double bits = static_cast<double>(symbols) * frames;
  const double ber = static_cast<double>(errors) / bits;
  const double theory = 0.5 * std::erfc(std::sqrt(std::pow(10.0, 0.4)));
  const double rel = (ber - theory) / theory;
  return {std::abs(rel) <= 0.10, fmt("BER %.5f vs Q(sqrt(2*10^0.4)) = %.5f (%+.2f%%) over %.0f bits", ber, theory,
                                     100 * rel, bits)};
}

train::DatasetSpec awgn_spec(std::vector<double> grid, std::size_t frames, std::uint64_t seed, int info_bits = 32) {
  train::DatasetSpec s;
  s.scenarios = {{channel::scenario_preset("awgn"), 1.0}};
  s.mcs_list = {phy::mcs_by_name("bpsk-hamming74", info_bits)};
  s.ebn0_grid_db = std::move(grid);
  s.samples_per_point = frames;
  s.master_seed = seed;
  s.split = train::Split::test;
  return s;
}

Outcome ml_dominance() {
  std::vector<double> grid;
  for (int i = 0; i <= 8; ++i) grid.push_back(i);
  const auto recs = train::evaluate_ber(awgn_spec(grid, 100000, 303), {train::ReceiverUnderTest::classical(rx::ReceiverChain::hard),
                                                                    train::ReceiverUnderTest::classical(rx::ReceiverChain::ml)});
  bool ok = true;
  std::string worst;
  double worst_gap = -INFINITY;
  for (double e : grid) {
    const auto& h = find(recs, "hard", e);
    const auto& m = find(recs, "ml", e);
    const double up = diff_upper(m, h, 32);
    ok = ok && up <= 0.0;
    if (up > worst_gap) worst_gap = up, worst = fmt("%.1f dB: ml %.2e vs hard %.2e", e, m.ber, h.ber);
  }
  return {ok, fmt("9 points x 1e5 frames; tightest %s, upper bound of ml-hard %.2e", worst.c_str(), worst_gap)};
}

Outcome cfo_collapse() {
  auto sc = channel::scenario_preset("awgn");
  sc.name = "cfo0.004";
  sc.rf.delta_f = channel::Range::fixed(0.004);
  train::DatasetSpec s;
  s.scenarios = {{sc, 1.0}};
  s.mcs_list = {phy::mcs_by_name("bpsk-hamming74", 32)};
  for (int i = 0; i <= 16; ++i) s.ebn0_grid_db.push_back(0.5 * i);
  s.samples_per_point = 3125;  // 1e5 bits
  s.master_seed = 404;
  s.split = train::Split::test;
  const auto recs = train::evaluate_ber(s, {train::ReceiverUnderTest::classical(rx::ReceiverChain::hard)});
  double lowest = 1.0;
  for (const auto& r : recs) lowest = std::min(lowest, r.ber);
  return {lowest > 0.01, fmt("lowest hard BER over 0-8 dB = %.4f (threshold 0.01)", lowest)};
}

Outcome gradients() {
  const auto results = harness::run_verify(harness::VerifySuite::gradients);
  bool ok = !results.empty();
  std::string d;
  for (const auto& r : results) {
    ok = ok && r.pass && r.value < 1e-4;
    d += fmt("%s %.1e; ", r.name.c_str(), r.value);
  }
  return {ok, d};
}

Outcome complexity() {
  bool ok = true;
  for (int M : {1, 16, 32, 64}) ok = ok && model::count_params(model::DeepReceiverConfig::reference(M)).heads == 602u * M;
  const auto ref = model::DeepReceiverConfig::reference(32);
  for (int n = 16; n <= 2048; n += 2) ok = ok && model::max_feature_map(ref, n) == 192u * n;
  const auto c = model::count_params(ref);
  const double rel = (static_cast<double>(c.backbone) - model::kReferenceBackboneParams) / model::kReferenceBackboneParams;
  ok = ok && std::abs(rel) < 0.01;
  std::fputs(harness::parameter_report(32).c_str(), stdout);
  return {ok, fmt("heads 602*M exact, max map 192N exact, backbone %zu vs 1248322 (%+.3f%%)", c.backbone, 100 * rel)};
}

Outcome length_adaptivity() {
  model::DeepReceiver<float> net(model::DeepReceiverConfig::reference(32), 7);
  bool ok = true;
  std::string d;
  for (int n : {144, 184, 224, 280, 360, 448, 560, 720}) {
    nn::FeatureMap<float> x(1, n, 2);
    Rng rng(n);
    std::normal_distribution<float> nd(0.0f, 0.3f);
    for (auto& v : x.values) v = nd(rng);
    const auto f = net.features(x);
    const auto p = net.predict(x);
    ok = ok && f.channels == 300 && f.length == 1 && p.size() == 32u * 2u;
    d += fmt("%d->%d ", n, f.channels);
  }
  return {ok, "feature dims " + d + "; outputs (32,2)"};
}

std::vector<double> ks_components(const phy::IqFrame& f) {
  std::vector<double> v;
  for (auto s : f.samples) v.push_back(s.real()), v.push_back(s.imag());
  return v;
}

Outcome aggn_consistency() {
  phy::IqFrame zero;
  zero.samples.assign(50000, cd{});
  auto a = ks_components(channel::apply_noise(zero, channel::NoiseSpec::awgn(), 0.0, 1, 91, 1.0));
  auto b = ks_components(channel::apply_noise(zero, channel::NoiseSpec::aggn(2.0), 0.0, 1, 92, 1.0));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double ne = std::sqrt(static_cast<double>(a.size()) * b.size() / (a.size() + b.size()));
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) p += 2.0 * (k % 2 ? 1 : -1) * std::exp(-2.0 * k * k * lambda * lambda);
  p = std::clamp(p, 0.0, 1.0);

  bool ok = p > 0.01;
  std::string det = fmt("KS D=%.4f p=%.3f over %zu samples; power error", d, p, a.size());
  for (double rho : {1.0, 1.5, 2.0}) {
    const auto n = channel::apply_noise(zero, channel::NoiseSpec::aggn(rho), 0.0, 1, 100 + static_cast<int>(rho * 10), 1.0);
    const double err = 10.0 * std::log10(n.mean_power() / 1.0);
    ok = ok && std::abs(err) <= 0.1;
    det += fmt(" rho=%.1f %+.3f dB", rho, err);
  }
  return {ok, det};
}

std::string slurp(const fs::path& p) {
  const auto b = io::read_file(p);
  return {b.begin(), b.end()};
}

Outcome determinism() {
  // Every preset, shrunk to a few frames, run twice: once single-threaded,
  // once with several threads.
  const auto root = fs::temp_directory_path() / "drx_acceptance_determinism";
  fs::remove_all(root);
  harness::ConfigMap shrink{{"train.samples_per_point", "3"}, {"test.samples_per_point", "3"},
                            {"train.epochs", "2"},           {"train.minibatch", "8"},
                            {"dynamic.frames", "3"},         {"seed", "77"}};
  const int threads = omp_get_max_threads();
  int identical = 0, total = 0;
  std::string bad;
  for (const auto& name : harness::preset_names()) {
    auto p = harness::make_preset(name);
    harness::apply_config(p, shrink);
    std::string files[2][3];
    for (int run = 0; run < 2; ++run) {
      omp_set_num_threads(run == 0 ? 1 : 3);
      harness::RunOptions o;
      o.out_dir = root / name / std::to_string(run);
      const auto s = harness::run_experiment(p, o);
      files[run][0] = slurp(s.csv);
      files[run][1] = s.checkpoint.empty() ? "" : slurp(s.checkpoint);
      files[run][2] = s.dataset.empty() ? "" : slurp(s.dataset);
    }
    ++total;
    if (files[0][0] == files[1][0] && files[0][1] == files[1][1] && files[0][2] == files[1][2]) ++identical;
    else bad += name + " ";
  }
  omp_set_num_threads(threads);
  fs::remove_all(root);
  return {identical == total,
          fmt("%d/%d presets byte-identical (CSV, checkpoint, dataset) across 1 vs 3 threads%s%s", identical, total,
              bad.empty() ? "" : "; differing: ", bad.c_str())};
}

Outcome learning_demo() {
  const auto preset = harness::make_preset("fig3-awgn-desk");
  const auto train_spec = preset.train_spec();
  const auto data = train::generate_dataset(train_spec);
  model::DeepReceiver<float> net(preset.model_config(), preset.model_seed());
  const auto tc = preset.effective_train_config();
  const auto result = train::train(data, tc, net);
  bool finite = true;
  for (const auto& p : result.trace) finite = finite && std::isfinite(p.loss);
  double tail = 0.0;
  int n = 0;
  for (auto it = result.trace.rbegin(); it != result.trace.rend() && n < 44; ++it, ++n) tail += it->loss;
  tail /= std::max(n, 1);

  auto test = preset.test_spec();
  test.ebn0_grid_db = {6.0};
  test.samples_per_point = 20000;
  const auto recs = train::evaluate_ber(
      test, {train::ReceiverUnderTest::classical(rx::ReceiverChain::hard), train::ReceiverUnderTest::deep(net)});
  const auto& h = find(recs, "hard", 6.0);
  const auto& d = find(recs, "deep", 6.0);
  const double up = diff_upper(d, h, preset.info_bits);

  // Monotonicity of the trained receiver across the grid.
  auto sweep = preset.test_spec();
  sweep.ebn0_grid_db = {0, 2, 4, 6, 8};
  sweep.samples_per_point = 4000;
  const auto s = train::evaluate_ber(sweep, {train::ReceiverUnderTest::deep(net)});
  bool monotone = true;
  for (std::size_t i = 1; i < s.size(); ++i) monotone = monotone && s[i].ci_low <= s[i - 1].ci_high;

  return {finite && up < 0.0 && monotone,
          fmt("%zu frames, %d epochs, %lld iterations, lr %.0e x%.1f every %d epochs, final loss %.3f "
              "(chance %.3f); 6 dB over %llu frames: deep %.4f [%.4f, %.4f] vs hard %.4f [%.4f, %.4f]; "
              "upper bound deep-hard %+.2e; loss finite %s; BER monotone %s",
              data.records.size(), tc.epochs, static_cast<long long>(result.iterations), tc.initial_lr, tc.lr_decay,
              tc.decay_interval_epochs, tail, 16 * std::log(2.0), static_cast<unsigned long long>(d.frames), d.ber,
              d.ci_low, d.ci_high, h.ber, h.ci_low, h.ci_high, up, finite ? "yes" : "no", monotone ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only, skip;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--only")) only.insert(std::atoi(argv[i + 1]));
    else if (!std::strcmp(argv[i], "--skip")) skip.insert(std::atoi(argv[i + 1]));
    else {
      std::fprintf(stderr, "usage: acceptance [--only N]... [--skip N]...\n");
      return 2;
    }
  }
  if (argc % 2 == 0) {
    std::fprintf(stderr, "usage: acceptance [--only N]... [--skip N]...\n");
    return 2;
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"codec oracle", codec_oracle},
      {"Eb/N0 calibration", ebn0_calibration},
      {"ML dominance over hard decisions", ml_dominance},
      {"CFO baseline collapse", cfo_collapse},
      {"gradient verification", gradients},
      {"complexity formulas", complexity},
      {"length adaptivity", length_adaptivity},
      {"desk-scale learning demonstration", learning_demo},
      {"AGGN consistency", aggn_consistency},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if ((!only.empty() && !only.contains(id)) || skip.contains(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d: %s  %s  (%s) [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed ? 1 : 0;
}
