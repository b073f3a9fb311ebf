#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "drx/model/config.hpp"
#include "drx/model/deep_receiver.hpp"

namespace drx::model {

struct TensorRecord {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> values;

  friend bool operator==(const TensorRecord&, const TensorRecord&) = default;
};

/// Architecture, training metadata and every named tensor (trainable
/// parameters and BN running statistics).
struct ModelCheckpoint {
  static constexpr std::uint16_t kVersion = 1;

  DeepReceiverConfig config;
  std::map<std::string, std::string> metadata;  // epochs, final_lr, dataset_digest, ...
  std::vector<TensorRecord> tensors;

  friend bool operator==(const ModelCheckpoint&, const ModelCheckpoint&) = default;
};

ModelCheckpoint make_checkpoint(DeepReceiver<float>& model, std::map<std::string, std::string> metadata = {});

/// Copies tensors into `model`. Throws ShapeError on a name or shape mismatch.
void load_into(const ModelCheckpoint& ckpt, DeepReceiver<float>& model);

/// Builds a model from the stored config and loads its tensors.
DeepReceiver<float> restore_model(const ModelCheckpoint& ckpt);

std::vector<std::uint8_t> serialize_checkpoint(const ModelCheckpoint& ckpt);
/// Throws FormatError on bad magic, version or truncation.
ModelCheckpoint deserialize_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const ModelCheckpoint& ckpt, const std::filesystem::path& path);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace drx::model
