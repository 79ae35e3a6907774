#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cdn/model/model.hpp"

namespace cdn::model {

class CheckpointError : public std::runtime_error {
public:
  explicit CheckpointError(const std::string& what)
      : std::runtime_error("checkpoint: " + what) {}
};

// Serialized model: "CDN1" magic, little-endian u64 JSON header length,
// UTF-8 JSON header (format version, config, vocabulary, block directory),
// then raw little-endian float32 blocks. Round-trips bit-exactly.
class Checkpoint {
public:
  static constexpr int kFormatVersion = 1;

  struct Block {
    std::string name;
    std::vector<int> shape;
    std::vector<float> data;
  };

  ModelConfig config;
  data::Vocabulary vocabulary;
  std::vector<Block> blocks;
  int epoch = 0;
  float best_val_loss = 0.0f;

  static Checkpoint from_model(const CdnModel& m, int epoch, float best_val_loss);
  CdnModel to_model() const;

  void save(const std::string& path) const;
  static Checkpoint load(const std::string& path);
};

}  // namespace cdn::model
