#include <numbers>
#include <set>

#include "doctest.h"
#include "drx/channel/fading.hpp"
#include "drx/channel/impairments.hpp"
#include "drx/channel/interference.hpp"
#include "drx/channel/noise.hpp"
#include "drx/channel/scenario.hpp"
#include "drx/phy/mcs.hpp"
#include "drx/rng.hpp"
#include "oracles.hpp"

using namespace drx;
using namespace drx::channel;
using cd = std::complex<double>;

namespace {

phy::IqFrame test_frame(std::uint64_t seed = 3) {
  const auto m = phy::mcs_by_name("bpsk-hamming74", 32);
  return phy::build_frame(m, phy::generate_info_bits(32, seed), seed).first;
}

phy::IqFrame zeros(std::size_t n) {
  phy::IqFrame f;
  f.samples.assign(n, cd{});
  return f;
}

std::vector<double> components(const phy::IqFrame& f) {
  std::vector<double> v;
  for (auto s : f.samples) {
    v.push_back(s.real());
    v.push_back(s.imag());
  }
  return v;
}

}  // namespace

TEST_CASE("CFO and phase rotation") {
  const auto f = test_frame();
  CHECK(apply_cfo_phase(f, 0.0, 0.0).samples == f.samples);
  const auto flipped = apply_cfo_phase(f, 0.0, std::numbers::pi);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(flipped.samples[i] + f.samples[i]) < 1e-12);

  phy::IqFrame ones;
  ones.samples.assign(449, cd(1.0, 0.0));
  const auto r = apply_cfo_phase(ones, 0.004, 0.0);
  for (std::size_t n = 0; n < ones.size(); ++n)
    CHECK(std::abs(r.samples[n] - std::polar(1.0, 2.0 * std::numbers::pi * 0.004 * n / 8.0)) < 1e-12);
  CHECK(2.0 * std::numbers::pi * 0.004 * 448 / 8 == doctest::Approx(1.407).epsilon(1e-3));
}

TEST_CASE("IQ imbalance") {
  const auto f = test_frame();
  const auto id = apply_iq_imbalance(f, 0.0, 0.0);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(id.samples[i] - f.samples[i]) < 1e-12);

  phy::IqFrame one;
  one.samples = {cd(1.0, 0.0), cd(0.0, 1.0)};
  const auto r = apply_iq_imbalance(one, 5.0, 10.0);
  const double g = std::pow(10.0, 5.0 / 40.0);
  const double phi = 10.0 * std::numbers::pi / 360.0;
  CHECK(std::abs(r.samples[0] - g * cd(std::cos(phi), -std::sin(phi))) < 1e-12);
  CHECK(std::abs(r.samples[1] - cd(0.0, 1.0) * g * cd(std::cos(phi), std::sin(phi))) < 1e-12);
}

TEST_CASE("Doppler shift") {
  CHECK(doppler_shift(1e9, 30.0, 0.0) == doctest::Approx(100.069).epsilon(1e-5));
  CHECK(std::abs(doppler_shift(1e9, 30.0, std::numbers::pi / 2)) < 1e-9);
  CHECK(doppler_shift(1e9, 0.0, 0.3) == 0.0);
}

TEST_CASE("fading: zero Doppler freezes the gain") {
  auto spec = FadingSpec::flat(0.0);
  const auto f = test_frame();
  const auto out = apply_fading(f, spec, 12);
  const cd g = out.samples[0] / f.samples[0];
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f.samples[i]) > 1e-6) CHECK(std::abs(out.samples[i] - g * f.samples[i]) < 1e-9);
}

TEST_CASE("fading: flat gain is unit power on average") {
  const auto spec = FadingSpec::flat(30.0);
  double p = 0.0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) p += std::norm(sample_path_gains(spec, static_cast<std::uint64_t>(s), 1e-5 * s)[0]);
  p /= trials;
  CHECK(p >= 0.97);
  CHECK(p <= 1.03);
}

TEST_CASE("fading: selective path powers follow 0/-3/-6 dB") {
  const auto spec = FadingSpec::selective(30.0);
  REQUIRE(spec.path_count() == 3);
  CHECK(spec.path_delays_s[0] == 0.0);
  CHECK(spec.path_delays_s[1] == doctest::Approx(0.9e-6));
  CHECK(spec.path_delays_s[2] == doctest::Approx(1.5e-6));
  CHECK(FadingSpec::selective(30.0, true).path_delays_s[1] == doctest::Approx(90e-6));
  std::vector<double> p(3, 0.0);
  const int trials = 20000;
  for (int s = 0; s < trials; ++s) {
    const auto g = sample_path_gains(spec, static_cast<std::uint64_t>(s) + 100, 0.0);
    for (int k = 0; k < 3; ++k) p[k] += std::norm(g[k]) / trials;
  }
  CHECK(p[0] == doctest::Approx(1.0).epsilon(0.03));
  CHECK(p[1] == doctest::Approx(std::pow(10.0, -0.3)).epsilon(0.03));
  CHECK(p[2] == doctest::Approx(std::pow(10.0, -0.6)).epsilon(0.03));
}

TEST_CASE("fading: errors and delay line") {
  auto f = test_frame();
  auto spec = FadingSpec::selective(30.0, true);  // 90 us > 56 us frame
  CHECK_THROWS_AS(apply_fading(f, spec, 1), std::invalid_argument);
  FadingSpec bad = FadingSpec::selective(30.0);
  bad.path_gains_db.pop_back();
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = FadingSpec::flat(-1.0);
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  std::vector<cd> x(64);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = cd(static_cast<double>(i), -static_cast<double>(i));
  const auto y = fractional_delay(x, 12.0);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[(i + 64 - 12) % 64]) < 1e-12);
}

TEST_CASE("noise: noiseless is identity, non-finite rejected") {
  const auto f = test_frame();
  CHECK(apply_noise(f, NoiseSpec::awgn(), std::numeric_limits<double>::infinity(), 32, 1).samples == f.samples);
  CHECK_THROWS_AS(apply_noise(f, NoiseSpec::awgn(), std::nan(""), 32, 1), std::invalid_argument);
  CHECK_THROWS_AS(apply_noise(f, NoiseSpec::awgn(), -std::numeric_limits<double>::infinity(), 32, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpec::aggn(0.0).validate(), std::invalid_argument);
}

TEST_CASE("noise: measured Eb/N0 within 0.1 dB for every shape") {
  // Eb measured on the clean frames, N0 on the added noise.
  for (const auto& spec : {NoiseSpec::awgn(), NoiseSpec::aggn(1.0), NoiseSpec::aggn(1.5), NoiseSpec::aggn(2.0)}) {
    CAPTURE(spec.rho);
    double eb = 0.0, n0 = 0.0;
    std::size_t samples = 0;
    for (std::uint64_t s = 0; samples < 100'000; ++s) {
      const auto f = test_frame(s);
      const auto r = apply_noise(f, spec, 5.0, 32, s);
      eb += f.energy() / 32.0;
      for (std::size_t i = 0; i < f.size(); ++i) n0 += std::norm(r.samples[i] - f.samples[i]);
      samples += f.size();
    }
    const double frames = std::ceil(100'000.0 / 448.0);
    const double measured = 10.0 * std::log10((eb / frames) / (n0 / static_cast<double>(samples)));
    CHECK(std::abs(measured - 5.0) < 0.1);
  }
}

TEST_CASE("noise: AGGN at rho=2 is indistinguishable from AWGN, rho=1 is not") {
  const auto a = components(apply_noise(zeros(50'000), NoiseSpec::awgn(), 0.0, 1, 11, 1.0));
  const auto b = components(apply_noise(zeros(50'000), NoiseSpec::aggn(2.0), 0.0, 1, 12, 1.0));
  const auto c = components(apply_noise(zeros(50'000), NoiseSpec::aggn(1.0), 0.0, 1, 13, 1.0));
  CHECK(oracle::ks_two_sample(a, b).second > 0.01);
  CHECK(oracle::ks_two_sample(a, c).second < 0.01);
}

TEST_CASE("noise: generalized Gaussian scale") {
  CHECK(aggn_scale(2.0, 0.5) == doctest::Approx(1.0));  // gamma^2 / 2 = variance
  // Laplacian: variance = 2 gamma^2.
  CHECK(aggn_scale(1.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("interference: identity when off, ISR calibrated for every kind") {
  const auto f = test_frame();
  CHECK(add_interference(f, InterferenceSpec::none(), 1).samples == f.samples);
  CHECK(add_interference(f, InterferenceSpec::tone(-std::numeric_limits<double>::infinity()), 1).samples == f.samples);
  for (const auto& spec : {InterferenceSpec::tone(20.0), InterferenceSpec::msk(7.0), InterferenceSpec::bpsk(-5.0)}) {
    CAPTURE(static_cast<int>(spec.kind));
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto r = add_interference(f, spec, s);
      double p = 0.0;
      for (std::size_t i = 0; i < f.size(); ++i) p += std::norm(r.samples[i] - f.samples[i]);
      const double isr = 10.0 * std::log10(p / f.energy());
      CHECK(std::abs(isr - spec.isr_db) < 0.05);
    }
  }
  CHECK_THROWS_AS(InterferenceSpec::tone(std::nan("")).validate(), std::invalid_argument);
}

TEST_CASE("interference: tone power ratio 100 at 20 dB, tone frequency in band") {
  const auto w = interferer_waveform(InterferenceSpec::tone(20.0), 448, 8, 4);
  double p = 0.0;
  for (auto v : w) p += std::norm(v);
  CHECK(p / 448.0 == doctest::Approx(1.0).epsilon(1e-9));
  // Constant-envelope tone: per-sample rotation is the tone frequency.
  const double step = std::arg(w[1] / w[0]);
  const double f_sym = step * 8.0 / (2.0 * std::numbers::pi);
  CHECK(std::abs(f_sym) <= 0.75 + 1e-12);
}

TEST_CASE("propagate: identity scenario, determinism, pinned noise") {
  const auto f = test_frame();
  const auto noiseless = scenario_preset("noiseless");
  CHECK(propagate(f, noiseless, 32, 5).samples == f.samples);

  for (const auto& name : scenario_preset_names()) {
    CAPTURE(name);
    auto sc = scenario_preset(name);
    if (!sc.pinned_ebn0) sc.ebn0_db = 4.0;
    if (name == "selective90") {  // 90 us delay is longer than a 56 us frame
      CHECK_THROWS_AS(propagate(f, sc, 32, 77), std::invalid_argument);
      continue;
    }
    ChannelDraw d1, d2;
    const auto a = propagate(f, sc, 32, 77, &d1);
    const auto b = propagate(f, sc, 32, 77, &d2);
    CHECK(a.samples == b.samples);
    CHECK(d1.delta_f == d2.delta_f);
    if (name != "noiseless") CHECK(a.samples != propagate(f, sc, 32, 78).samples);
    CHECK(std::abs(d1.delta_f) <= 0.01);
  }
  CHECK(scenario_preset("iqimb").name == "iqimb2");
  CHECK_THROWS_AS(scenario_preset("nope"), std::invalid_argument);
}

TEST_CASE("scenario descriptions are distinct") {
  std::set<std::string> seen;
  for (const auto& n : scenario_preset_names()) seen.insert(scenario_preset(n).describe());
  CHECK(seen.size() == scenario_preset_names().size());
}
