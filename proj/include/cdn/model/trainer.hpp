#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cdn/data/corpus.hpp"
#include "cdn/model/checkpoint.hpp"

namespace cdn::model {

class EmptySplit : public std::runtime_error {
public:
  explicit EmptySplit(const std::string& what)
      : std::runtime_error("empty split: " + what) {}
};

class DivergedLoss : public std::runtime_error {
public:
  explicit DivergedLoss(const std::string& what)
      : std::runtime_error("loss diverged: " + what) {}
};

struct EpochStats {
  int epoch = 0;
  float learning_rate = 0.0f;
  float kl_weight = 0.0f;
  float train_total = 0.0f;           // epoch means per sequence
  float train_reconstruction = 0.0f;
  float train_kl = 0.0f;
  float validation_reconstruction = 0.0f;
};

struct TrainResult {
  Checkpoint best;                    // best-validation snapshot
  std::vector<EpochStats> curve;
  std::vector<float> step_losses;     // per-step total, for trend checks
  int stopped_after_epoch = 0;
};

// Deterministic reconstruction error (z = mu) averaged over a split.
float validation_reconstruction(const CdnModel& m,
                                const std::vector<data::EncodedSequence>& seqs);

using EpochCallback = std::function<void(const EpochStats&)>;

// Minibatch Adam with teacher forcing; diversity is fixed to 1 during
// training. Early-stops on validation reconstruction error.
TrainResult train(const data::CorpusSplit& split, const ModelConfig& cfg,
                  const EpochCallback& on_epoch = nullptr);

}  // namespace cdn::model
