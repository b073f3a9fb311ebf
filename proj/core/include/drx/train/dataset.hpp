#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "drx/channel/scenario.hpp"
#include "drx/phy/mcs.hpp"

namespace drx::train {

enum class Split { train, test };

struct WeightedScenario {
  channel::ChannelScenario scenario;
  double weight = 1.0;
};

/// Frames over a grid of operating points. Record i belongs to point
/// i / samples_per_point; points enumerate Eb/N0 (outer) x ISR (inner).
/// An empty ISR grid keeps each scenario's own ISR range.
struct DatasetSpec {
  std::vector<WeightedScenario> scenarios;
  std::vector<phy::McsSpec> mcs_list;
  std::vector<double> ebn0_grid_db;
  std::vector<double> isr_grid_db;
  std::size_t samples_per_point = 0;
  std::uint64_t master_seed = 0;
  Split split = Split::train;

  std::size_t points() const { return ebn0_grid_db.size() * std::max<std::size_t>(isr_grid_db.size(), 1); }
  std::size_t record_count() const { return points() * samples_per_point; }
  void validate() const;
  std::string describe() const;
  std::uint64_t digest() const;
};

/// Seed of record `index`. Train and test use disjoint inputs to a bijective
/// mixer, so the two domains can never share a seed.
std::uint64_t record_seed(std::uint64_t master_seed, Split split, std::size_t index);

/// One synthesized received frame with everything needed to score it.
struct FrameSample {
  std::size_t index = 0;
  std::size_t mcs_index = 0;
  std::size_t scenario_index = 0;
  double ebn0_db = 0.0;
  std::optional<double> isr_db;  // set when the point fixes an ISR
  channel::ChannelDraw draw;
  phy::IqFrame rx;
  phy::BitStream info;
};

FrameSample synthesize(const DatasetSpec& spec, std::size_t index);

/// Stored dataset row.
struct DatasetRecord {
  static constexpr std::int32_t kNoIsr = std::numeric_limits<std::int32_t>::min();
  static constexpr std::int32_t kNoNoise = std::numeric_limits<std::int32_t>::max();

  std::uint16_t mcs_id = 0;
  std::uint16_t scenario_id = 0;
  std::int32_t ebn0_cdb = 0;  // centi-dB; kNoNoise for noiseless frames
  std::int32_t isr_cdb = kNoIsr;
  std::vector<float> iq;      // interleaved I, Q
  std::vector<std::uint8_t> labels;

  int length() const { return static_cast<int>(iq.size() / 2); }
  int num_bits() const { return static_cast<int>(labels.size()); }
  friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

DatasetRecord to_record(const DatasetSpec& spec, const FrameSample& sample);

struct Dataset {
  static constexpr std::uint16_t kVersion = 1;
  std::vector<DatasetRecord> records;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Synthesizes every record; parallel by index, identical for any thread count.
Dataset generate_dataset(const DatasetSpec& spec);

std::vector<std::uint8_t> serialize_dataset(const Dataset& data);
Dataset deserialize_dataset(const std::vector<std::uint8_t>& bytes);
void write_dataset(const Dataset& data, const std::filesystem::path& path);
Dataset read_dataset(const std::filesystem::path& path);

/// FNV-1a of the serialized form.
std::uint64_t dataset_digest(const Dataset& data);

std::string hex_digest(std::uint64_t digest);

}  // namespace drx::train
