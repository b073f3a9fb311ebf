#include "drx/model/checkpoint.hpp"

#include <sstream>
#include <unordered_map>

#include "drx/errors.hpp"
#include "drx/io/binary.hpp"

namespace drx::model {

namespace {

constexpr char kMagic[4] = {'D', 'R', 'X', 'M'};
constexpr std::string_view kMetaPrefix = "meta.";

std::vector<std::uint32_t> dims_of(const std::vector<int>& shape) {
  return {shape.begin(), shape.end()};
}

struct Slot {
  std::vector<std::uint32_t> dims;
  std::vector<float>* values;
};

std::vector<std::pair<std::string, Slot>> slots_of(DeepReceiver<float>& model) {
  std::vector<std::pair<std::string, Slot>> out;
  for (auto* p : model.parameters()) out.push_back({p->name, {dims_of(p->shape), &p->value}});
  for (auto& b : model.buffers())
    out.push_back({b.name, {{static_cast<std::uint32_t>(b.values->size())}, b.values}});
  return out;
}

}  // namespace

ModelCheckpoint make_checkpoint(DeepReceiver<float>& model, std::map<std::string, std::string> metadata) {
  ModelCheckpoint ckpt;
  ckpt.config = model.config();
  ckpt.metadata = std::move(metadata);
  for (auto& [name, slot] : slots_of(model)) ckpt.tensors.push_back({name, slot.dims, *slot.values});
  return ckpt;
}

void load_into(const ModelCheckpoint& ckpt, DeepReceiver<float>& model) {
  std::unordered_map<std::string, const TensorRecord*> by_name;
  for (const auto& t : ckpt.tensors) {
    if (!by_name.emplace(t.name, &t).second) throw FormatError("checkpoint: duplicate tensor " + t.name);
  }
  auto slots = slots_of(model);
  if (slots.size() != ckpt.tensors.size())
    throw ShapeError("checkpoint: holds " + std::to_string(ckpt.tensors.size()) + " tensors, model expects " +
                     std::to_string(slots.size()));
  // Validate everything before touching the model.
  for (const auto& [name, slot] : slots) {
    const auto it = by_name.find(name);
    if (it == by_name.end()) throw ShapeError("checkpoint: missing tensor " + name);
    if (it->second->dims != slot.dims || it->second->values.size() != slot.values->size())
      throw ShapeError("checkpoint: shape mismatch for " + name);
  }
  for (auto& [name, slot] : slots) *slot.values = by_name.at(name)->values;
}

DeepReceiver<float> restore_model(const ModelCheckpoint& ckpt) {
  DeepReceiver<float> model(ckpt.config, 0);
  load_into(ckpt, model);
  return model;
}

std::vector<std::uint8_t> serialize_checkpoint(const ModelCheckpoint& ckpt) {
  std::ostringstream text;
  text << ckpt.config.to_text();
  for (const auto& [k, v] : ckpt.metadata) {
    if (k.empty() || k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos)
      throw std::invalid_argument("checkpoint metadata keys/values must be single-line and keys free of '='");
    text << kMetaPrefix << k << '=' << v << '\n';
  }
  io::ByteWriter w;
  w.put_bytes(kMagic, 4);
  w.put(ModelCheckpoint::kVersion);
  w.put_string(text.str());
  w.put(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    std::size_t count = 1;
    for (auto d : t.dims) count *= d;
    if (count != t.values.size()) throw std::invalid_argument("checkpoint: tensor " + t.name + " dims/value mismatch");
    w.put_string(t.name);
    w.put(static_cast<std::uint32_t>(t.dims.size()));
    for (auto d : t.dims) w.put(d);
    w.put_bytes(t.values.data(), t.values.size() * sizeof(float));
  }
  return std::move(w.bytes());
}

ModelCheckpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes) {
  io::ByteReader r(bytes.data(), bytes.size(), "checkpoint");
  if (std::memcmp(r.take(4), kMagic, 4) != 0) throw FormatError("checkpoint: bad magic");
  const auto version = r.get<std::uint16_t>();
  if (version != ModelCheckpoint::kVersion)
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));

  ModelCheckpoint ckpt;
  const std::string text = r.get_string();
  std::string config_text;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind(kMetaPrefix, 0) == 0) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError("checkpoint: bad metadata line");
      ckpt.metadata[line.substr(kMetaPrefix.size(), eq - kMetaPrefix.size())] = line.substr(eq + 1);
    } else {
      config_text += line + '\n';
    }
  }
  try {
    ckpt.config = DeepReceiverConfig::from_text(config_text);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint: bad config: ") + e.what());
  }

  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i) {
    TensorRecord t;
    t.name = r.get_string(4096);
    const auto rank = r.get<std::uint32_t>();
    if (rank > 8) throw FormatError("checkpoint: tensor rank out of range");
    std::uint64_t n = 1;
    for (std::uint32_t d = 0; d < rank; ++d) {
      t.dims.push_back(r.get<std::uint32_t>());
      n *= t.dims.back();
      if (n > r.remaining()) throw FormatError("checkpoint: truncated");
    }
    t.values.resize(n);
    std::memcpy(t.values.data(), r.take(n * sizeof(float)), n * sizeof(float));
    ckpt.tensors.push_back(std::move(t));
  }
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes");
  return ckpt;
}

void save_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& path) {
  io::write_file(path, serialize_checkpoint(ckpt));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(io::read_file(path));
}

}  // namespace drx::model
