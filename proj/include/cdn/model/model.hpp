#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cdn/data/vocabulary.hpp"
#include "cdn/model/config.hpp"
#include "cdn/nn/ops.hpp"
#include "cdn/rng.hpp"

namespace cdn::model {

class VocabularyMismatch : public std::runtime_error {
public:
  explicit VocabularyMismatch(const std::string& what)
      : std::runtime_error("vocabulary mismatch: " + what) {}
};

struct LatentGaussian {
  nn::Tensor mu;         // [latent_dim]
  nn::Tensor log_sigma;  // [latent_dim], clamped to [-8, 8]
};

enum class DecoderMode { Argmax, Sampling };

DecoderMode decoder_mode_from_string(const std::string& s);
std::string to_string(DecoderMode m);

struct DiversityConfig {
  double diversity = 1.0;  // D; 1 reproduces standard reparameterized sampling
  int samples = 1;         // k
  DecoderMode decoder_mode = DecoderMode::Argmax;
  std::uint64_t seed = 0;
};

struct LossBreakdown {
  float reconstruction = 0.0f;  // mean masked cross-entropy per token
  float kl = 0.0f;
  float total = 0.0f;           // reconstruction + kl_weight * kl
};

// Conditional Diversity Network: convolutional encoder over character
// embeddings -> Gaussian latent -> diversity sampling -> LSTM decoder.
class CdnModel {
public:
  CdnModel(ModelConfig cfg, data::Vocabulary vocab, std::uint64_t init_seed);

  const ModelConfig& config() const { return cfg_; }
  const data::Vocabulary& vocab() const { return vocab_; }
  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
  void zero_grads();

  // --- inference path (no tape) ---
  LatentGaussian encode(const data::EncodedSequence& seq) const;
  nn::Tensor diverse_sample(const LatentGaussian& g, double diversity,
                            Rng& rng) const;
  // Teacher-forced logits for target positions 1..true_length+1 plus the
  // loss breakdown; KL comes from the encoder output.
  std::pair<std::vector<nn::Tensor>, LossBreakdown> decode_teacher_forced(
      const nn::Tensor& z, const data::EncodedSequence& target,
      const LatentGaussian& latent, float kl_weight) const;
  std::string generate(const nn::Tensor& z, DecoderMode mode, Rng& rng) const;
  std::vector<std::string> generate_from_prototype(const std::string& prototype,
                                                   const DiversityConfig& cfg) const;
  std::string generate_unconditional(Rng& rng, DecoderMode mode) const;

  // --- training graph ---
  struct LossVars {
    nn::VarId total, reconstruction, kl;
  };
  // Builds the full encode -> sample(given noise) -> teacher-forced decode
  // graph for one sequence. noise must have latent_dim entries.
  LossVars build_loss(nn::Tape& tape, const data::EncodedSequence& seq,
                      const std::vector<float>& noise, float kl_weight);

  // Named parameter access for checkpointing.
  nn::Parameter* find_parameter(const std::string& name);

private:
  ModelConfig cfg_;
  data::Vocabulary vocab_;

  nn::Parameter embedding_;                 // [vocab x embed_dim]
  std::vector<nn::Parameter> conv_w_;       // per width: [filters x width*embed_dim]
  std::vector<nn::Parameter> conv_b_;       // per width: [filters]
  nn::Parameter w_mu_, b_mu_;               // [latent x total_filters]
  nn::Parameter w_ls_, b_ls_;
  nn::Parameter w_proj_, b_proj_;           // latent -> decoder (h, c)
  nn::Parameter wx_, wh_, b_lstm_;          // LSTM cell
  nn::Parameter w_out_, b_out_;             // [vocab x units]

  int total_filters() const {
    return cfg_.filters_per_width * static_cast<int>(cfg_.filter_widths.size());
  }
  Eigen::VectorXf embed_row(int id) const;
  void lstm_step_plain(const Eigen::VectorXf& x, Eigen::VectorXf& h,
                       Eigen::VectorXf& c) const;
  void decoder_init_plain(const nn::Tensor& z, Eigen::VectorXf& h,
                          Eigen::VectorXf& c) const;
  friend class Checkpoint;
};

}  // namespace cdn::model
