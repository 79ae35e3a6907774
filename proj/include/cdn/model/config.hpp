#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace cdn::model {

// Hyperparameters; defaults follow the reference configuration
// (max length 50, 128-d embeddings, filter widths 3-6 with 128 filters each,
// 300-d latent, 150 LSTM units, batch 64, initial learning rate 1e-3).
struct ModelConfig {
  int max_len = 50;
  int embed_dim = 128;
  std::vector<int> filter_widths = {3, 4, 5, 6};
  int filters_per_width = 128;
  int latent_dim = 300;
  int lstm_units = 150;
  int batch_size = 64;
  float initial_learning_rate = 1e-3f;
  float lr_decay_rate = 0.95f;           // exponential, per epoch
  float kl_weight_start = 0.0f;          // linear ramp start
  float kl_weight_max = 1.0f;            // linear ramp end
  long kl_ramp_steps = 10'000;           // steps to reach kl_weight_max
  int early_stop_patience = 5;           // epochs without validation improvement
  int max_epochs = 100;
  std::uint64_t seed = 1;

  int seq_len() const { return max_len + 2; }  // START + tokens + END
  float kl_weight_at(long step) const {
    if (kl_ramp_steps <= 0) return kl_weight_max;
    float ramp = static_cast<float>(step) / static_cast<float>(kl_ramp_steps);
    if (ramp > 1.0f) ramp = 1.0f;
    return kl_weight_start + (kl_weight_max - kl_weight_start) * ramp;
  }

  std::string to_json() const;
  static ModelConfig from_json(const std::string& text);
  // key=value overrides (CLI --config), e.g. "latent_dim=64".
  void apply_override(const std::string& key, const std::string& value);
};

}  // namespace cdn::model
