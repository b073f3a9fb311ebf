// drx: dataset generation, training, evaluation and verification front end.
//
// Exit status: 0 ok, 1 verification failure or diverged training,
// 2 usage error, 3 I/O or file-format error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drx/errors.hpp"
#include "drx/harness/experiment.hpp"
#include "drx/harness/presets.hpp"
#include "drx/harness/verify.hpp"
#include "drx/model/checkpoint.hpp"
#include "drx/model/complexity.hpp"
#include "drx/nn/tensor.hpp"

namespace fs = std::filesystem;
using namespace drx;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kIo = 3 };

struct Common {
  std::string preset = "fig3-awgn-desk";
  CLI::Option* preset_opt = nullptr;
  std::optional<std::uint64_t> seed;
  std::string config_file;
  std::vector<std::string> sets;
  std::string width_scale;
  std::vector<std::string> receivers;
  std::string out;
  bool nondeterministic = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_preset = true) {
  if (with_preset) {
    c.preset_opt = cmd->add_option("--preset,-p", c.preset, "experiment preset (overrides a config file's preset key)")
                       ->capture_default_str();
    cmd->add_option("--config", c.config_file, "flat key = value file applied over the preset");
    cmd->add_option("--set", c.sets, "override one key (key=value), repeatable");
    cmd->add_option("--seed", c.seed, "master seed");
    cmd->add_option("--width-scale", c.width_scale, "model width scale, e.g. 1/8 or 1");
    cmd->add_option("--receiver,-r", c.receivers, "receivers to evaluate (hard, ml, eqA, eqB, eqC, deep)")
        ->delimiter(',');
    cmd->add_flag("--deterministic,!--no-deterministic", "fixed-order reductions (default on)")
        ->each([&c](const std::string& v) { c.nondeterministic = v == "false" || v == "-1" || v == "0"; });
  }
  cmd->add_flag("--quiet,-q", c.quiet, "no progress output");
}

harness::ExperimentPreset resolve(const Common& c) {
  harness::ConfigMap cfg;
  if (!c.config_file.empty()) cfg = harness::load_config(c.config_file);
  if (c.preset_opt && c.preset_opt->count() > 0) cfg.erase("preset");
  auto preset = harness::make_preset(cfg.contains("preset") ? cfg.at("preset") : c.preset);
  for (const auto& s : c.sets) harness::apply_override(cfg, s);
  if (c.seed) cfg["seed"] = std::to_string(*c.seed);
  if (!c.width_scale.empty()) cfg["model.width_scale"] = c.width_scale;
  if (!c.receivers.empty()) {
    std::string joined;
    for (const auto& r : c.receivers) joined += (joined.empty() ? "" : ",") + r;
    cfg["receivers"] = joined;
  }
  if (c.nondeterministic) cfg["train.deterministic"] = "false";
  harness::apply_config(preset, cfg);
  preset.validate();
  nn::runtime_options().deterministic = preset.train_config.deterministic;
  return preset;
}

std::ostream* log_stream(const Common& c) { return c.quiet ? nullptr : &std::cerr; }

void write_or_print(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f || !(f << text)) throw IoError("cannot write " + out);
}

std::vector<train::ReceiverUnderTest> receivers_for(const harness::ExperimentPreset& p,
                                                    const model::DeepReceiver<float>* model) {
  std::vector<train::ReceiverUnderTest> out;
  for (const auto& r : p.receivers) {
    if (r == "deep") {
      if (!model) throw std::invalid_argument("receiver 'deep' needs --model");
      out.push_back(train::ReceiverUnderTest::deep(*model));
    } else {
      out.push_back(train::ReceiverUnderTest::classical(rx::parse_receiver_chain(r)));
    }
  }
  return out;
}

std::vector<train::BerRecord> evaluate(const harness::ExperimentPreset& p,
                                       const std::vector<train::ReceiverUnderTest>& receivers) {
  if (!p.dynamic_settings.empty()) {
    std::vector<channel::ChannelScenario> settings;
    for (const auto& s : p.dynamic_settings) settings.push_back(channel::scenario_preset(s));
    return train::run_dynamic_sequence(receivers, settings, p.mcs_specs().front(), p.dynamic_frames,
                                       p.test_spec().master_seed);
  }
  return train::evaluate_ber(p.test_spec(), receivers);
}

std::string csv_for(const harness::ExperimentPreset& p, const std::vector<train::BerRecord>& records) {
  return harness::ber_csv(records, p.name, p.seed, harness::config_digest(p.to_config()));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drx: learned and classical baseband receivers, simulation and verification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "drx 0.1.0");

  Common gen_c, train_c, eval_c, base_c, run_c, inspect_c, verify_c;

  auto* gen = app.add_subcommand("gen-dataset", "generate a preset's train or test set as a .drxd file");
  add_common(gen, gen_c);
  std::string gen_split = "train";
  gen->add_option("--split", gen_split, "train or test")->check(CLI::IsMember({"train", "test"}))->capture_default_str();
  gen->add_option("--out,-o", gen_c.out, "output .drxd file")->required();

  auto* trn = app.add_subcommand("train", "train a preset's model and write a .drxm checkpoint");
  add_common(trn, train_c);
  std::string train_dataset, train_loss;
  trn->add_option("--dataset", train_dataset, "training .drxd file (default: generate from the preset)");
  trn->add_option("--loss-csv", train_loss, "write the per-iteration loss trace here");
  trn->add_option("--out,-o", train_c.out, "output checkpoint")->required();

  auto* ev = app.add_subcommand("eval", "BER of a trained model (and any classical receivers) on the preset's test set");
  add_common(ev, eval_c);
  std::string eval_model;
  ev->add_option("--model,-m", eval_model, "checkpoint")->required();
  ev->add_option("--out,-o", eval_c.out, "CSV output (default stdout)");

  auto* base = app.add_subcommand("baseline", "BER of classical receivers on the preset's test set");
  add_common(base, base_c);
  base->add_option("--out,-o", base_c.out, "CSV output (default stdout)");

  auto* run = app.add_subcommand("run", "full preset: data, training, evaluation, CSV and manifest");
  add_common(run, run_c);
  run_c.out = "out";
  std::string run_cache;
  run->add_option("--out,-o", run_c.out, "output directory")->capture_default_str();
  run->add_option("--cache", run_cache, "dataset cache directory (default <out>/cache)");
  bool list_presets = false;
  run->add_flag("--list", list_presets, "list presets and exit");

  auto* ver = app.add_subcommand("verify", "oracle, gradient, complexity and calibration checks (JSON lines)");
  std::string suite_name = "all";
  ver->add_option("suite", suite_name, "codecs | gradients | complexity | calibration | all")
      ->check(CLI::IsMember({"codecs", "gradients", "complexity", "calibration", "all"}))
      ->capture_default_str();
  ver->add_option("--out,-o", verify_c.out, "report file (default stdout)");

  auto* ins = app.add_subcommand("inspect", "per-layer parameter table, or a checkpoint's contents");
  std::string ins_model, ins_width = "1";
  int ins_bits = 32, ins_length = 448;
  ins->add_option("--model,-m", ins_model, "checkpoint to describe");
  ins->add_option("--width-scale", ins_width, "width scale for the table")->capture_default_str();
  ins->add_option("--bits", ins_bits, "number of output heads M")->capture_default_str();
  ins->add_option("--length", ins_length, "input length N for feature-map sizes")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      const auto p = resolve(gen_c);
      const auto spec = gen_split == "train" ? p.train_spec() : p.test_spec();
      if (!gen_c.quiet) std::cerr << "generating " << spec.record_count() << " records\n";
      const auto data = train::generate_dataset(spec);
      train::write_dataset(data, gen_c.out);
      std::cout << gen_c.out << " " << data.records.size() << " records digest "
                << train::hex_digest(train::dataset_digest(data)) << '\n';
    } else if (*trn) {
      const auto p = resolve(train_c);
      if (!p.needs_model()) throw std::invalid_argument("preset '" + p.name + "' lists no learned receiver");
      const auto data = train_dataset.empty() ? train::generate_dataset(p.train_spec()) : train::read_dataset(train_dataset);
      model::DeepReceiver<float> model(p.model_config(), p.model_seed());
      const auto tc = p.effective_train_config();
      std::int64_t last = -1;
      auto result = train::train(data, tc, model, [&](const train::LossPoint& lp) {
        if (!train_c.quiet && lp.epoch != last) {
          last = lp.epoch;
          std::cerr << "epoch " << lp.epoch << " lr " << lp.learning_rate << " loss " << lp.loss << '\n';
        }
      });
      result.checkpoint.metadata["preset"] = p.name;
      result.checkpoint.metadata["seed"] = std::to_string(p.seed);
      model::save_checkpoint(result.checkpoint, train_c.out);
      if (!train_loss.empty()) write_or_print(train_loss, train::loss_trace_csv(result.trace));
      std::cout << train_c.out << " iterations " << result.iterations << " final loss "
                << (result.trace.empty() ? 0.0 : result.trace.back().loss) << '\n';
    } else if (*ev) {
      auto p = resolve(eval_c);
      const auto model = model::restore_model(model::load_checkpoint(eval_model));
      if (model.config().num_bits != p.model_config().num_bits)
        throw ShapeError("checkpoint has M=" + std::to_string(model.config().num_bits) + " but preset '" + p.name +
                         "' expects M=" + std::to_string(p.model_config().num_bits));
      if (eval_c.receivers.empty()) p.receivers = {"deep"};
      write_or_print(eval_c.out, csv_for(p, evaluate(p, receivers_for(p, &model))));
    } else if (*base) {
      auto p = resolve(base_c);
      std::erase(p.receivers, "deep");
      if (p.receivers.empty()) throw std::invalid_argument("no classical receiver selected");
      write_or_print(base_c.out, csv_for(p, evaluate(p, receivers_for(p, nullptr))));
    } else if (*run) {
      if (list_presets) {
        for (const auto& n : harness::preset_names())
          std::cout << n << "  " << harness::make_preset(n).description << '\n';
        return kOk;
      }
      const auto p = resolve(run_c);
      harness::RunOptions opt;
      opt.out_dir = run_c.out;
      opt.cache_dir = run_cache;
      opt.log = log_stream(run_c);
      const auto s = harness::run_experiment(p, opt);
      std::cout << s.csv.string() << '\n' << s.manifest.string() << '\n';
    } else if (*ver) {
      const auto results = harness::run_verify(harness::parse_verify_suite(suite_name));
      write_or_print(verify_c.out, harness::to_json_lines(results));
      if (suite_name == "complexity" || suite_name == "all") std::cerr << harness::parameter_report(32);
      bool ok = true;
      for (const auto& r : results) ok = ok && r.pass;
      return ok ? kOk : kVerifyFailed;
    } else if (*ins) {
      if (!ins_model.empty()) {
        const auto ck = model::load_checkpoint(ins_model);
        std::cout << ck.config.to_text();
        for (const auto& [k, v] : ck.metadata) std::cout << "meta." << k << " = " << v << '\n';
        std::size_t total = 0;
        for (const auto& t : ck.tensors) {
          std::cout << t.name << " [";
          for (std::size_t i = 0; i < t.dims.size(); ++i) std::cout << (i ? "," : "") << t.dims[i];
          std::cout << "] " << t.values.size() << '\n';
          total += t.values.size();
        }
        std::cout << "stored values " << total << '\n';
      } else {
        auto cfg = model::DeepReceiverConfig::reference(ins_bits);
        cfg.width_scale = model::WidthScale::parse(ins_width);
        cfg.validate();
        const auto counts = model::count_params(cfg);
        if (cfg.width_scale.num == cfg.width_scale.den) {
          std::cout << harness::parameter_report(ins_bits);
        } else {
          std::printf("%-22s %-6s %6s %6s %10s\n", "layer", "kind", "in", "out", "total");
          for (const auto& r : model::parameter_table(cfg))
            std::printf("%-22s %-6s %6d %6d %10zu\n", r.name.c_str(), r.kind.c_str(), r.in_channels, r.out_channels,
                        r.total());
          std::cout << "backbone " << counts.backbone << ", heads " << counts.heads << ", total " << counts.total << '\n';
        }
        std::cout << "feature dim " << cfg.feature_dim() << ", max feature map at N=" << ins_length << ": "
                  << model::max_feature_map(cfg, ins_length) << ", operations "
                  << model::operation_count(cfg, ins_length).total() << '\n';
      }
    }
  } catch (const TrainingDiverged& e) {
    std::cerr << "drx: " << e.what() << '\n';
    return kVerifyFailed;
  } catch (const FormatError& e) {
    std::cerr << "drx: " << e.what() << '\n';
    return kIo;
  } catch (const IoError& e) {
    std::cerr << "drx: " << e.what() << '\n';
    return kIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "drx: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "drx: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
