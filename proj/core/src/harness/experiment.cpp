#include "drx/harness/experiment.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "drx/errors.hpp"
#include "drx/io/binary.hpp"
#include "drx/model/checkpoint.hpp"
#include "json.hpp"

namespace drx::harness {

namespace fs = std::filesystem;
using nlohmann::json;

DirectoryLock::DirectoryLock(const fs::path& dir) : path_(dir / ".drx.lock") {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd_ < 0) throw IoError("directory " + dir.string() + " is locked by another run (" + path_.string() + ")");
  const auto pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] auto n = ::write(fd_, pid.data(), pid.size());
}

DirectoryLock::~DirectoryLock() {
  if (fd_ >= 0) {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
}

std::string ber_csv_header() {
  return "scenario,mcs,receiver,ebn0_db,isr_db,frames,bit_errors,ber,ci_low,ci_high,preset,seed,config_digest\n";
}

std::string ber_csv(const std::vector<train::BerRecord>& records, const std::string& preset, std::uint64_t seed,
                    const std::string& digest) {
  std::string out = ber_csv_header();
  char buf[512];
  for (const auto& r : records) {
    char isr[32] = "";
    if (r.isr_db) std::snprintf(isr, sizeof isr, "%.6g", *r.isr_db);
    std::snprintf(buf, sizeof buf, "%s,%s,%s,%.6g,%s,%llu,%llu,%.9g,%.9g,%.9g,%s,%llu,%s\n", r.scenario.c_str(),
                  r.mcs.c_str(), r.receiver.c_str(), r.ebn0_db, isr, static_cast<unsigned long long>(r.frames),
                  static_cast<unsigned long long>(r.bit_errors), r.ber, r.ci_low, r.ci_high, preset.c_str(),
                  static_cast<unsigned long long>(seed), digest.c_str());
    out += buf;
  }
  return out;
}

std::string config_digest(const ConfigMap& effective) {
  const auto text = config_to_text(effective);
  return train::hex_digest(fnv1a(text.data(), text.size()));
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  io::write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::uint64_t file_digest(const fs::path& path) {
  const auto bytes = io::read_file(path);
  return fnv1a(bytes.data(), bytes.size());
}

}  // namespace

train::Dataset cached_dataset(const train::DatasetSpec& spec, const fs::path& cache_dir, fs::path* file) {
  fs::create_directories(cache_dir);
  const std::string stem = "train-" + train::hex_digest(spec.digest());
  const fs::path data_path = cache_dir / (stem + ".drxd");
  const fs::path sum_path = cache_dir / (stem + ".digest");
  if (file) *file = data_path;
  if (fs::exists(data_path) && fs::exists(sum_path)) {
    std::ifstream in(sum_path);
    std::string recorded;
    in >> recorded;
    const auto bytes = io::read_file(data_path);
    const auto actual = train::hex_digest(fnv1a(bytes.data(), bytes.size()));
    if (recorded != actual)
      throw FormatError("cache digest mismatch for " + data_path.string() + ": recorded " + recorded + ", found " + actual);
    return train::deserialize_dataset(bytes);
  }
  auto data = train::generate_dataset(spec);
  const auto bytes = train::serialize_dataset(data);
  io::write_file(data_path, bytes);
  write_text(sum_path, train::hex_digest(fnv1a(bytes.data(), bytes.size())) + "\n");
  return data;
}

RunSummary run_experiment(const ExperimentPreset& preset, const RunOptions& options) {
  preset.validate();
  const auto start = std::chrono::steady_clock::now();
  const fs::path out = options.out_dir;
  const fs::path cache = options.cache_dir.empty() ? out / "cache" : options.cache_dir;
  DirectoryLock lock(out);
  auto log = [&](const std::string& msg) {
    if (options.log) *options.log << "[" << preset.name << "] " << msg << std::endl;
  };

  const auto effective = preset.to_config();
  RunSummary summary;
  summary.config_digest = config_digest(effective);

  json manifest;
  manifest["preset"] = preset.name;
  manifest["description"] = preset.description;
  manifest["seed"] = preset.seed;
  manifest["config"] = effective;
  manifest["config_digest"] = summary.config_digest;

  std::vector<train::ReceiverUnderTest> receivers;
  std::optional<model::DeepReceiver<float>> model;
  if (preset.needs_model()) {
    const auto spec = preset.train_spec();
    log("training set: " + std::to_string(spec.record_count()) + " records");
    const auto data = cached_dataset(spec, cache, &summary.dataset);
    manifest["train_spec_digest"] = train::hex_digest(spec.digest());
    manifest["dataset"] = summary.dataset.string();
    manifest["dataset_digest"] = train::hex_digest(file_digest(summary.dataset));

    model.emplace(preset.model_config(), preset.model_seed());
    const auto tc = preset.effective_train_config();
    log("training " + std::to_string(tc.epochs) + " epochs, minibatch " + std::to_string(tc.minibatch));
    std::int64_t last_epoch = -1;
    auto result = train::train(data, tc, *model, [&](const train::LossPoint& p) {
      if (p.epoch != last_epoch) {
        last_epoch = p.epoch;
        log("epoch " + std::to_string(p.epoch) + " lr " + std::to_string(p.learning_rate) + " loss " + std::to_string(p.loss));
      }
    });
    summary.checkpoint = out / (preset.name + ".drxm");
    model::save_checkpoint(result.checkpoint, summary.checkpoint);
    write_text(out / (preset.name + ".loss.csv"), train::loss_trace_csv(result.trace));
    manifest["checkpoint"] = summary.checkpoint.string();
    manifest["checkpoint_digest"] = train::hex_digest(file_digest(summary.checkpoint));
    manifest["iterations"] = result.iterations;
    manifest["final_loss"] = result.trace.empty() ? 0.0 : result.trace.back().loss;
  }
  for (const auto& r : preset.receivers) {
    if (r == "deep") receivers.push_back(train::ReceiverUnderTest::deep(*model));
    else receivers.push_back(train::ReceiverUnderTest::classical(rx::parse_receiver_chain(r)));
  }

  if (!preset.dynamic_settings.empty()) {
    std::vector<channel::ChannelScenario> settings;
    for (const auto& s : preset.dynamic_settings) settings.push_back(channel::scenario_preset(s));
    log("dynamic sequence over " + std::to_string(settings.size()) + " settings");
    summary.records = train::run_dynamic_sequence(receivers, settings, preset.mcs_specs().front(),
                                                  preset.dynamic_frames, preset.test_spec().master_seed);
  } else {
    const auto test = preset.test_spec();
    log("evaluating " + std::to_string(test.record_count()) + " test frames");
    summary.records = train::evaluate_ber(test, receivers);
    manifest["test_spec_digest"] = train::hex_digest(test.digest());
  }

  summary.csv = out / (preset.name + ".csv");
  write_text(summary.csv, ber_csv(summary.records, preset.name, preset.seed, summary.config_digest));
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest["csv"] = summary.csv.string();
  manifest["csv_digest"] = train::hex_digest(file_digest(summary.csv));
  manifest["wall_seconds"] = summary.wall_seconds;
  summary.manifest = out / (preset.name + ".manifest.json");
  write_text(summary.manifest, manifest.dump(2) + "\n");
  log("wrote " + summary.csv.string());
  return summary;
}

}  // namespace drx::harness
