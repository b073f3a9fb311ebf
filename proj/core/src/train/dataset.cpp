#include "drx/train/dataset.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "drx/errors.hpp"
#include "drx/io/binary.hpp"
#include "drx/rng.hpp"

namespace drx::train {

namespace {

constexpr char kMagic[4] = {'D', 'R', 'X', 'D'};

std::int32_t to_cdb(double db) {
  const double v = std::round(db * 100.0);
  if (!(v > std::numeric_limits<std::int32_t>::min() && v < std::numeric_limits<std::int32_t>::max()))
    throw std::invalid_argument("dB value out of range for storage");
  return static_cast<std::int32_t>(v);
}

}  // namespace

void DatasetSpec::validate() const {
  if (scenarios.empty()) throw std::invalid_argument("dataset: no scenarios");
  if (mcs_list.empty()) throw std::invalid_argument("dataset: no MCS");
  if (ebn0_grid_db.empty()) throw std::invalid_argument("dataset: empty Eb/N0 grid");
  if (samples_per_point == 0) throw std::invalid_argument("dataset: samples_per_point must be >= 1");
  double total = 0.0;
  for (const auto& ws : scenarios) {
    ws.scenario.validate();
    if (!(ws.weight >= 0.0) || !std::isfinite(ws.weight)) throw std::invalid_argument("dataset: bad scenario weight");
    total += ws.weight;
  }
  if (!(total > 0.0)) throw std::invalid_argument("dataset: scenario weights sum to zero");
  for (const auto& m : mcs_list) {
    m.validate();
    if (m.info_bits != mcs_list.front().info_bits)
      throw std::invalid_argument("dataset: all MCS must carry the same number of information bits");
  }
  for (double e : ebn0_grid_db)
    if (std::isnan(e) || e == -std::numeric_limits<double>::infinity())
      throw std::invalid_argument("dataset: invalid Eb/N0 grid value");
  for (double v : isr_grid_db)
    if (!std::isfinite(v)) throw std::invalid_argument("dataset: ISR grid values must be finite");
}

std::string DatasetSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "split=" << (split == Split::train ? "train" : "test") << ";seed=" << master_seed
     << ";samples=" << samples_per_point << ";ebn0=";
  for (double e : ebn0_grid_db) os << e << ',';
  os << ";isr=";
  for (double v : isr_grid_db) os << v << ',';
  os << ";mcs=";
  for (const auto& m : mcs_list)
    os << m.name() << '/' << m.id << '/' << m.info_bits << '/' << m.prefix_bits << '/' << m.oversampling << ',';
  os << ";scenarios=";
  for (const auto& ws : scenarios) os << ws.scenario.describe() << '*' << ws.weight << ',';
  return os.str();
}

std::uint64_t DatasetSpec::digest() const {
  const auto d = describe();
  return fnv1a(d.data(), d.size());
}

std::uint64_t record_seed(std::uint64_t master_seed, Split split, std::size_t index) {
  const std::uint64_t domain = split == Split::train ? 0 : (1ULL << 63);
  return derive_seed(master_seed, domain | static_cast<std::uint64_t>(index));
}

FrameSample synthesize(const DatasetSpec& spec, std::size_t index) {
  if (index >= spec.record_count()) throw std::out_of_range("dataset: record index out of range");
  const std::uint64_t seed = record_seed(spec.master_seed, spec.split, index);
  FrameSample s;
  s.index = index;

  const std::size_t point = index / spec.samples_per_point;
  const std::size_t isr_points = std::max<std::size_t>(spec.isr_grid_db.size(), 1);
  s.ebn0_db = spec.ebn0_grid_db[point / isr_points];

  Rng pick(derive_seed(seed, Stream::mcs_pick));
  s.mcs_index = spec.mcs_list.size() == 1
                    ? 0
                    : std::uniform_int_distribution<std::size_t>(0, spec.mcs_list.size() - 1)(pick);
  if (spec.scenarios.size() > 1) {
    std::vector<double> w;
    for (const auto& ws : spec.scenarios) w.push_back(ws.weight);
    Rng spick(derive_seed(seed, Stream::scenario_pick));
    s.scenario_index = std::discrete_distribution<std::size_t>(w.begin(), w.end())(spick);
  }

  const auto& mcs = spec.mcs_list[s.mcs_index];
  auto scenario = spec.scenarios[s.scenario_index].scenario;
  if (scenario.pinned_ebn0) s.ebn0_db = scenario.ebn0_db;
  else scenario.ebn0_db = s.ebn0_db;
  if (!spec.isr_grid_db.empty() && scenario.interference.kind != channel::InterferenceKind::none) {
    scenario.isr_db = channel::Range::fixed(spec.isr_grid_db[point % isr_points]);
  }
  if (scenario.isr_db.is_fixed() && scenario.interference.kind != channel::InterferenceKind::none)
    s.isr_db = scenario.isr_db.lo;

  s.info = phy::generate_info_bits(static_cast<std::size_t>(mcs.info_bits), derive_seed(seed, Stream::info_bits));
  auto [tx, labels] = phy::build_frame(mcs, s.info, derive_seed(seed, Stream::frame));
  s.rx = channel::propagate(tx, scenario, mcs.info_bits, derive_seed(seed, Stream::channel), &s.draw);
  return s;
}

DatasetRecord to_record(const DatasetSpec& spec, const FrameSample& sample) {
  DatasetRecord r;
  r.mcs_id = static_cast<std::uint16_t>(spec.mcs_list[sample.mcs_index].id);
  r.scenario_id = static_cast<std::uint16_t>(spec.scenarios[sample.scenario_index].scenario.id);
  r.ebn0_cdb = std::isinf(sample.ebn0_db) ? DatasetRecord::kNoNoise : to_cdb(sample.ebn0_db);
  const bool has_interferer = std::isfinite(sample.draw.isr_db);
  r.isr_cdb = has_interferer ? to_cdb(sample.draw.isr_db) : DatasetRecord::kNoIsr;
  r.iq.resize(2 * sample.rx.size());
  for (std::size_t i = 0; i < sample.rx.size(); ++i) {
    r.iq[2 * i] = static_cast<float>(sample.rx.samples[i].real());
    r.iq[2 * i + 1] = static_cast<float>(sample.rx.samples[i].imag());
  }
  r.labels = sample.info.bits;
  return r;
}

Dataset generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  Dataset d;
  const std::size_t n = spec.record_count();
  d.records.resize(n);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::size_t i = 0; i < n; ++i) d.records[i] = to_record(spec, synthesize(spec, i));
  return d;
}

std::vector<std::uint8_t> serialize_dataset(const Dataset& data) {
  io::ByteWriter w;
  w.put_bytes(kMagic, 4);
  w.put(Dataset::kVersion);
  w.put(static_cast<std::uint64_t>(data.records.size()));
  for (const auto& r : data.records) {
    if (r.iq.size() % 2 != 0) throw std::invalid_argument("dataset: odd IQ sample count");
    w.put(r.mcs_id);
    w.put(r.scenario_id);
    w.put(r.ebn0_cdb);
    w.put(r.isr_cdb);
    w.put(static_cast<std::uint32_t>(r.iq.size() / 2));
    w.put(static_cast<std::uint32_t>(r.labels.size()));
    w.put_bytes(r.iq.data(), r.iq.size() * sizeof(float));
    std::vector<std::uint8_t> packed((r.labels.size() + 7) / 8, 0);
    for (std::size_t m = 0; m < r.labels.size(); ++m) {
      if (r.labels[m] > 1) throw std::invalid_argument("dataset: label bits must be 0 or 1");
      packed[m / 8] |= static_cast<std::uint8_t>(r.labels[m] << (m % 8));
    }
    w.put_bytes(packed.data(), packed.size());
  }
  return std::move(w.bytes());
}

Dataset deserialize_dataset(const std::vector<std::uint8_t>& bytes) {
  io::ByteReader r(bytes.data(), bytes.size(), "dataset");
  if (std::memcmp(r.take(4), kMagic, 4) != 0) throw FormatError("dataset: bad magic");
  const auto version = r.get<std::uint16_t>();
  if (version != Dataset::kVersion) throw FormatError("dataset: unsupported version " + std::to_string(version));
  const auto count = r.get<std::uint64_t>();
  // Smallest possible record is 20 header bytes.
  if (count > r.remaining() / 20) throw FormatError("dataset: record count exceeds file size");
  Dataset d;
  d.records.resize(count);
  for (auto& rec : d.records) {
    rec.mcs_id = r.get<std::uint16_t>();
    rec.scenario_id = r.get<std::uint16_t>();
    rec.ebn0_cdb = r.get<std::int32_t>();
    rec.isr_cdb = r.get<std::int32_t>();
    const auto n = r.get<std::uint32_t>();
    const auto m = r.get<std::uint32_t>();
    const std::size_t iq_bytes = static_cast<std::size_t>(n) * 2 * sizeof(float);
    rec.iq.resize(static_cast<std::size_t>(n) * 2);
    std::memcpy(rec.iq.data(), r.take(iq_bytes), iq_bytes);
    const auto* packed = r.take((static_cast<std::size_t>(m) + 7) / 8);
    rec.labels.resize(m);
    for (std::size_t b = 0; b < m; ++b) rec.labels[b] = (packed[b / 8] >> (b % 8)) & 1;
  }
  if (r.remaining() != 0) throw FormatError("dataset: trailing bytes");
  return d;
}

void write_dataset(const Dataset& data, const std::filesystem::path& path) {
  io::write_file(path, serialize_dataset(data));
}

Dataset read_dataset(const std::filesystem::path& path) { return deserialize_dataset(io::read_file(path)); }

std::uint64_t dataset_digest(const Dataset& data) {
  const auto bytes = serialize_dataset(data);
  return fnv1a(bytes.data(), bytes.size());
}

std::string hex_digest(std::uint64_t digest) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << digest;
  return os.str();
}

}  // namespace drx::train
