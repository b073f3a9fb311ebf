#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "drx/harness/presets.hpp"
#include "drx/train/ber.hpp"

namespace drx::harness {

/// Exclusive lock on a directory, held for the object's lifetime. Creation
/// fails with IoError if another process holds it.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& dir);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

std::string ber_csv_header();
std::string ber_csv(const std::vector<train::BerRecord>& records, const std::string& preset, std::uint64_t seed,
                    const std::string& config_digest);

std::string config_digest(const ConfigMap& effective);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::filesystem::path cache_dir;  // default: <out_dir>/cache
  std::ostream* log = nullptr;
};

struct RunSummary {
  std::vector<train::BerRecord> records;
  std::filesystem::path csv;
  std::filesystem::path manifest;
  std::filesystem::path checkpoint;  // empty when no model was trained
  std::filesystem::path dataset;
  std::string config_digest;
  double wall_seconds = 0.0;
};

/// Generates (or reuses) the training set, trains the model if a learned
/// receiver is listed, evaluates every receiver and writes
/// <preset>.csv, <preset>.manifest.json, <preset>.loss.csv and <preset>.drxm.
/// A cached dataset whose recorded digest does not match its contents raises
/// FormatError.
RunSummary run_experiment(const ExperimentPreset& preset, const RunOptions& options);

/// Dataset for `spec` from the cache directory, generating and recording it on
/// a miss.
train::Dataset cached_dataset(const train::DatasetSpec& spec, const std::filesystem::path& cache_dir,
                              std::filesystem::path* file = nullptr);

}  // namespace drx::harness
