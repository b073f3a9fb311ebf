#include "drx/harness/presets.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "drx/channel/scenario.hpp"
#include "drx/rng.hpp"
#include "drx/rx/receiver.hpp"

namespace drx::harness {

namespace {

std::vector<double> half_db_grid() {
  std::vector<double> g;
  for (int i = 0; i <= 16; ++i) g.push_back(0.5 * i);
  return g;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

ExperimentPreset base(const std::string& name, const std::string& description) {
  ExperimentPreset p;
  p.name = name;
  p.description = description;
  p.test_ebn0 = half_db_grid();
  return p;
}

ExperimentPreset interference(const std::string& name, const std::string& scenario, const std::string& what) {
  auto p = base(name, "BPSK+Hamming(7,4) under co-channel " + what + " interference, ISR in [-20, 30] dB");
  p.train_scenarios = p.test_scenarios = {scenario};
  p.test_ebn0 = {0, 2, 4, 6, 8};
  p.test_isr = {-20, -10, -5, 0, 5, 10, 20, 30};
  p.test_samples = 500;
  p.receivers = {"hard", "deep"};
  return p;
}

std::vector<ExperimentPreset> all_presets() {
  std::vector<ExperimentPreset> v;
  v.push_back(base("fig3-awgn-desk", "BPSK+Hamming(7,4) over AWGN; hard, ML and learned receivers"));
  {
    auto p = base("fig4-aggn-desk", "BPSK+Hamming(7,4) under generalized Gaussian noise, rho = 1.5 and 1");
    p.train_scenarios = p.test_scenarios = {"aggn15", "aggn1"};
    v.push_back(p);
  }
  {
    auto p = base("fig5-cfo-desk", "BPSK+Hamming(7,4) with carrier offset drawn from [-0.01, 0.01]");
    p.train_scenarios = p.test_scenarios = {"cfo"};
    p.receivers = {"hard", "deep"};
    v.push_back(p);
  }
  {
    auto p = base("fig7-iqimb-desk", "QPSK+Hamming(7,4) under three IQ imbalance settings");
    p.mcs = {"qpsk-hamming74"};
    p.train_scenarios = p.test_scenarios = {"iqimb1", "iqimb2", "iqimb3"};
    p.receivers = {"hard", "deep"};
    v.push_back(p);
  }
  {
    auto p = base("fig8-flat-desk", "BPSK+Hamming(7,4), flat Rayleigh fading, 8-bit training prefix");
    p.prefix_bits = 8;
    p.train_scenarios = p.test_scenarios = {"flat"};
    p.receivers = {"hard", "eqA", "eqB", "eqC", "deep"};
    v.push_back(p);
  }
  {
    auto p = base("fig9-selective-desk", "BPSK+Hamming(7,4), three-path selective Rayleigh fading, 8-bit prefix");
    p.prefix_bits = 8;
    p.train_scenarios = p.test_scenarios = {"selective"};
    p.receivers = {"hard", "eqA", "eqB", "eqC", "deep"};
    v.push_back(p);
  }
  v.push_back(interference("fig11-tone-desk", "tone", "single-tone"));
  v.push_back(interference("fig12-msk-desk", "msk", "MSK"));
  v.push_back(interference("fig13-bpsk-desk", "bpsk-int", "BPSK"));
  {
    auto p = base("fig14-dynamic-desk", "one model trained on AWGN, AGGN, flat and selective fading; evaluated over four settings in sequence");
    p.prefix_bits = 32;
    p.train_scenarios = {"awgn", "aggn15", "flat", "selective"};
    p.test_scenarios = {"awgn"};
    p.receivers = {"hard", "eqA", "eqB", "eqC", "deep"};
    p.dynamic_settings = {"dynamic1", "dynamic2", "dynamic3", "dynamic4"};
    p.dynamic_frames = 2000;
    v.push_back(p);
  }
  {
    auto p = base("fig15-mcs-desk", "one model for all six tabulated MCS, 30 information bits, AWGN");
    p.mcs = {"mcs1", "mcs2", "mcs3", "mcs4", "mcs5", "mcs6"};
    p.info_bits = 30;
    p.train_samples = 3000;
    p.test_ebn0 = {0, 2, 4, 6, 8};
    p.test_samples = 1200;
    p.receivers = {"hard", "deep"};
    v.push_back(p);
  }
  {
    auto p = base("smoke", "tiny end-to-end run for plumbing checks");
    p.info_bits = 8;
    p.train_ebn0 = {2, 6};
    p.train_samples = 48;
    p.test_ebn0 = {4};
    p.test_samples = 64;
    p.train_config.epochs = 1;
    p.train_config.minibatch = 32;
    v.push_back(p);
  }
  return v;
}

channel::ChannelScenario scenario(const std::string& name) { return channel::scenario_preset(name); }

}  // namespace

std::vector<phy::McsSpec> ExperimentPreset::mcs_specs() const {
  std::vector<phy::McsSpec> out;
  for (const auto& m : mcs) out.push_back(phy::mcs_by_name(m, info_bits, prefix_bits));
  return out;
}

train::DatasetSpec ExperimentPreset::train_spec() const {
  train::DatasetSpec s;
  for (const auto& n : train_scenarios) s.scenarios.push_back({scenario(n), 1.0});
  s.mcs_list = mcs_specs();
  s.ebn0_grid_db = train_ebn0;
  s.samples_per_point = train_samples;
  s.master_seed = derive_seed(seed, 101);
  s.split = train::Split::train;
  return s;
}

train::DatasetSpec ExperimentPreset::test_spec() const {
  train::DatasetSpec s;
  for (const auto& n : test_scenarios) s.scenarios.push_back({scenario(n), 1.0});
  s.mcs_list = mcs_specs();
  s.ebn0_grid_db = test_ebn0;
  s.isr_grid_db = test_isr;
  s.samples_per_point = test_samples;
  s.master_seed = derive_seed(seed, 102);
  s.split = train::Split::test;
  return s;
}

model::DeepReceiverConfig ExperimentPreset::model_config() const {
  model::DeepReceiverConfig c;
  c.num_bits = info_bits;
  c.width_scale = width_scale;
  c.validate();
  return c;
}

std::uint64_t ExperimentPreset::model_seed() const { return derive_seed(seed, 103); }

train::TrainConfig ExperimentPreset::effective_train_config() const {
  auto t = train_config;
  t.seed = derive_seed(seed, 104);
  return t;
}

bool ExperimentPreset::needs_model() const {
  return std::find(receivers.begin(), receivers.end(), "deep") != receivers.end();
}

void ExperimentPreset::validate() const {
  if (receivers.empty()) throw std::invalid_argument("preset " + name + ": no receivers");
  for (const auto& r : receivers)
    if (r != "deep") rx::parse_receiver_chain(r);
  if (std::set<std::string>(receivers.begin(), receivers.end()).size() != receivers.size())
    throw std::invalid_argument("preset " + name + ": duplicate receiver");
  train_spec().validate();
  if (dynamic_settings.empty()) test_spec().validate();
  for (const auto& d : dynamic_settings) scenario(d);
  if (!dynamic_settings.empty() && dynamic_frames == 0)
    throw std::invalid_argument("preset " + name + ": dynamic.frames must be >= 1");
  if (needs_model()) model_config();
  train_config.validate();
}

ConfigMap ExperimentPreset::to_config() const {
  ConfigMap c;
  c["preset"] = name;
  c["seed"] = std::to_string(seed);
  c["mcs"] = join(mcs);
  c["mcs.info_bits"] = std::to_string(info_bits);
  c["mcs.prefix_bits"] = std::to_string(prefix_bits);
  c["train.scenarios"] = join(train_scenarios);
  c["train.ebn0"] = join(train_ebn0);
  c["train.samples_per_point"] = std::to_string(train_samples);
  c["train.epochs"] = std::to_string(train_config.epochs);
  c["train.minibatch"] = std::to_string(train_config.minibatch);
  c["train.lr"] = join(std::vector<double>{train_config.initial_lr});
  c["train.lr_decay"] = join(std::vector<double>{train_config.lr_decay});
  c["train.decay_interval"] = std::to_string(train_config.decay_interval_epochs);
  c["train.momentum"] = join(std::vector<double>{train_config.momentum});
  c["train.deterministic"] = train_config.deterministic ? "true" : "false";
  c["train.with_replacement"] = train_config.with_replacement ? "true" : "false";
  c["test.scenarios"] = join(test_scenarios);
  c["test.ebn0"] = join(test_ebn0);
  c["test.isr"] = join(test_isr);
  c["test.samples_per_point"] = std::to_string(test_samples);
  c["model.width_scale"] = width_scale.text();
  c["receivers"] = join(receivers);
  c["dynamic.settings"] = join(dynamic_settings);
  c["dynamic.frames"] = std::to_string(dynamic_frames);
  return c;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : all_presets()) names.push_back(p.name);
  return names;
}

ExperimentPreset make_preset(const std::string& name) {
  for (auto& p : all_presets())
    if (p.name == name) return p;
  throw std::invalid_argument("unknown preset '" + name + "'");
}

void apply_config(ExperimentPreset& p, const ConfigMap& c) {
  static const std::set<std::string> known = {
      "preset", "seed", "mcs", "mcs.info_bits", "mcs.prefix_bits", "train.scenarios", "train.ebn0",
      "train.samples_per_point", "train.epochs", "train.minibatch", "train.lr", "train.lr_decay",
      "train.decay_interval", "train.momentum", "train.deterministic", "train.with_replacement",
      "test.scenarios", "test.ebn0", "test.isr", "test.samples_per_point", "model.width_scale", "receivers",
      "dynamic.settings", "dynamic.frames"};
  for (const auto& [k, v] : c)
    if (!known.contains(k)) throw std::invalid_argument("unknown config key '" + k + "'");

  auto non_negative = [&](const std::string& key, long long fallback) {
    const auto v = get_int(c, key, fallback);
    if (v < 0) throw std::invalid_argument("config: '" + key + "' must be >= 0");
    return v;
  };
  auto optional_list = [&](const std::string& key, const std::vector<double>& fallback) {
    const auto it = c.find(key);
    if (it != c.end() && it->second.empty()) return std::vector<double>{};
    return get_list(c, key, fallback);
  };
  auto optional_words = [&](const std::string& key, const std::vector<std::string>& fallback) {
    const auto it = c.find(key);
    if (it != c.end() && it->second.empty()) return std::vector<std::string>{};
    return get_words(c, key, fallback);
  };

  p.name = get_string(c, "preset", p.name);
  p.seed = static_cast<std::uint64_t>(non_negative("seed", static_cast<long long>(p.seed)));
  p.mcs = get_words(c, "mcs", p.mcs);
  p.info_bits = static_cast<int>(get_int(c, "mcs.info_bits", p.info_bits));
  p.prefix_bits = static_cast<int>(non_negative("mcs.prefix_bits", p.prefix_bits));
  p.train_scenarios = get_words(c, "train.scenarios", p.train_scenarios);
  p.train_ebn0 = get_list(c, "train.ebn0", p.train_ebn0);
  p.train_samples = static_cast<std::size_t>(non_negative("train.samples_per_point", static_cast<long long>(p.train_samples)));
  auto& t = p.train_config;
  t.epochs = static_cast<int>(get_int(c, "train.epochs", t.epochs));
  t.minibatch = static_cast<int>(get_int(c, "train.minibatch", t.minibatch));
  t.initial_lr = get_double(c, "train.lr", t.initial_lr);
  t.lr_decay = get_double(c, "train.lr_decay", t.lr_decay);
  t.decay_interval_epochs = static_cast<int>(get_int(c, "train.decay_interval", t.decay_interval_epochs));
  t.momentum = get_double(c, "train.momentum", t.momentum);
  t.deterministic = get_bool(c, "train.deterministic", t.deterministic);
  t.with_replacement = get_bool(c, "train.with_replacement", t.with_replacement);
  p.test_scenarios = get_words(c, "test.scenarios", p.test_scenarios);
  p.test_ebn0 = get_list(c, "test.ebn0", p.test_ebn0);
  p.test_isr = optional_list("test.isr", p.test_isr);
  p.test_samples = static_cast<std::size_t>(non_negative("test.samples_per_point", static_cast<long long>(p.test_samples)));
  if (c.contains("model.width_scale")) p.width_scale = model::WidthScale::parse(c.at("model.width_scale"));
  p.receivers = get_words(c, "receivers", p.receivers);
  p.dynamic_settings = optional_words("dynamic.settings", p.dynamic_settings);
  p.dynamic_frames = static_cast<std::size_t>(non_negative("dynamic.frames", static_cast<long long>(p.dynamic_frames)));
  p.validate();
}

}  // namespace drx::harness
