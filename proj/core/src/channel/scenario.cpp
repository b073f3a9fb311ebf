#include "drx/channel/scenario.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "drx/rng.hpp"

namespace drx::channel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ChannelScenario base(const std::string& name) {
  ChannelScenario s;
  s.name = name;
  return s;
}

ChannelScenario with_interference(const std::string& name, InterferenceSpec spec) {
  auto s = base(name);
  s.interference = spec;
  s.isr_db = {-20.0, 30.0};
  return s;
}

ChannelScenario with_iq(const std::string& name, double alpha, double beta) {
  auto s = base(name);
  s.rf.alpha_db = alpha;
  s.rf.beta_deg = beta;
  return s;
}

// Registry order fixes the scenario ids stored in dataset files.
std::vector<ChannelScenario> build_registry() {
  std::vector<ChannelScenario> r;
  auto noiseless = base("noiseless");
  noiseless.ebn0_db = kInf;
  noiseless.pinned_ebn0 = true;
  r.push_back(noiseless);
  r.push_back(base("awgn"));
  {
    auto s = base("aggn15");
    s.noise = NoiseSpec::aggn(1.5);
    r.push_back(s);
  }
  {
    auto s = base("aggn1");
    s.noise = NoiseSpec::aggn(1.0);
    r.push_back(s);
  }
  {
    auto s = base("cfo");
    s.rf.delta_f = {-0.01, 0.01};
    r.push_back(s);
  }
  r.push_back(with_iq("iqimb1", -3.0, -2.0));
  r.push_back(with_iq("iqimb2", 5.0, 10.0));
  r.push_back(with_iq("iqimb3", -3.0, 20.0));
  {
    auto s = base("flat");
    s.fading = FadingSpec::flat(30.0);
    r.push_back(s);
  }
  {
    auto s = base("selective");
    s.fading = FadingSpec::selective(30.0);
    r.push_back(s);
  }
  {
    auto s = base("selective90");
    s.fading = FadingSpec::selective(30.0, true);
    r.push_back(s);
  }
  r.push_back(with_interference("tone", InterferenceSpec::tone(0.0)));
  r.push_back(with_interference("msk", InterferenceSpec::msk(0.0)));
  r.push_back(with_interference("bpsk-int", InterferenceSpec::bpsk(0.0)));
  {
    auto s = base("dynamic1");
    s.ebn0_db = 6.0;
    s.pinned_ebn0 = true;
    r.push_back(s);
  }
  {
    auto s = base("dynamic2");
    s.noise = NoiseSpec::aggn(1.5);
    s.ebn0_db = 6.0;
    s.pinned_ebn0 = true;
    r.push_back(s);
  }
  {
    auto s = base("dynamic3");
    s.fading = FadingSpec::flat(30.0);
    s.ebn0_db = 6.0;
    s.pinned_ebn0 = true;
    r.push_back(s);
  }
  {
    auto s = base("dynamic4");
    s.fading = FadingSpec::selective(30.0);
    s.ebn0_db = 7.0;
    s.pinned_ebn0 = true;
    r.push_back(s);
  }
  for (std::size_t i = 0; i < r.size(); ++i) r[i].id = static_cast<int>(i);
  return r;
}

const std::vector<ChannelScenario>& registry() {
  static const auto r = build_registry();
  return r;
}

}  // namespace

bool RfImpairmentSpec::identity() const {
  return delta_f.is_fixed() && delta_f.lo == 0.0 && theta0.is_fixed() && theta0.lo == 0.0 &&
         alpha_db == 0.0 && beta_deg == 0.0;
}

void ChannelScenario::validate() const {
  noise.validate();
  fading.validate();
  interference.validate();
  if (rf.delta_f.lo > rf.delta_f.hi || rf.theta0.lo > rf.theta0.hi || isr_db.lo > isr_db.hi) {
    throw std::invalid_argument("scenario: empty parameter range");
  }
  if (!std::isfinite(rf.alpha_db) || !std::isfinite(rf.beta_deg) || !std::isfinite(rf.delta_f.lo) ||
      !std::isfinite(rf.delta_f.hi) || !std::isfinite(rf.theta0.lo) || !std::isfinite(rf.theta0.hi)) {
    throw std::invalid_argument("scenario: RF impairment values must be finite");
  }
  if (std::isnan(ebn0_db) || ebn0_db == -kInf) throw std::invalid_argument("scenario: invalid Eb/N0");
}

std::string ChannelScenario::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << name << "|noise=" << static_cast<int>(noise.kind) << ',' << noise.rho << ',' << noise.mu << "|rf=" << rf.delta_f.lo
     << ',' << rf.delta_f.hi << ',' << rf.theta0.lo << ',' << rf.theta0.hi << ',' << rf.alpha_db << ','
     << rf.beta_deg << "|fading=" << static_cast<int>(fading.kind) << ',' << fading.max_doppler_hz << ','
     << fading.oscillators;
  for (std::size_t i = 0; i < fading.path_delays_s.size(); ++i)
    os << ',' << fading.path_delays_s[i] << '@' << fading.path_gains_db[i];
  os << "|int=" << static_cast<int>(interference.kind) << ',' << interference.symbol_rate_ratio << ','
     << interference.rolloff << ',' << interference.signal_rolloff << "|isr=" << isr_db.lo << ',' << isr_db.hi
     << "|ebn0=" << ebn0_db << (pinned_ebn0 ? "!" : "");
  return os.str();
}

IqFrame propagate(const IqFrame& frame, const ChannelScenario& scenario, int info_bits,
                  std::uint64_t seed, ChannelDraw* realized) {
  scenario.validate();
  frame.validate();
  const double tx_energy = frame.energy();

  IqFrame out = apply_fading(frame, scenario.fading, derive_seed(seed, Stream::fading));

  Rng rf_rng(derive_seed(seed, Stream::rf));
  ChannelDraw draw;
  draw.delta_f = scenario.rf.delta_f.draw(rf_rng);
  draw.theta0 = scenario.rf.theta0.draw(rf_rng);
  out = apply_cfo_phase(out, draw.delta_f, draw.theta0);
  out = apply_iq_imbalance(out, scenario.rf.alpha_db, scenario.rf.beta_deg);

  if (scenario.interference.kind != InterferenceKind::none) {
    Rng isr_rng(derive_seed(seed, Stream::scenario_pick));
    draw.isr_db = scenario.isr_db.draw(isr_rng);
    auto spec = scenario.interference;
    spec.isr_db = draw.isr_db;
    out = add_interference(out, spec, derive_seed(seed, Stream::interference));
  }

  out = apply_noise(out, scenario.noise, scenario.ebn0_db, info_bits, seed, tx_energy);
  if (realized) *realized = draw;
  return out;
}

ChannelScenario scenario_preset(const std::string& name) {
  for (const auto& s : registry()) {
    if (s.name == name) return s;
  }
  if (name == "iqimb") return scenario_preset("iqimb2");
  throw std::invalid_argument("unknown scenario preset: " + name);
}

std::vector<std::string> scenario_preset_names() {
  std::vector<std::string> names;
  for (const auto& s : registry()) names.push_back(s.name);
  return names;
}

}  // namespace drx::channel
