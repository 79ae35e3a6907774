#include <cmath>
#include <numeric>

#include "cdn/model/trainer.hpp"
#include "cdn/nn/adam.hpp"

namespace cdn::model {

float validation_reconstruction(const CdnModel& m,
                                const std::vector<data::EncodedSequence>& seqs) {
  double sum = 0.0;
  for (const auto& seq : seqs) {
    LatentGaussian g = m.encode(seq);
    nn::Tensor z = g.mu;  // deterministic: posterior mean
    auto [logits, loss] = m.decode_teacher_forced(z, seq, g, 0.0f);
    sum += loss.reconstruction;
  }
  return static_cast<float>(sum / static_cast<double>(seqs.size()));
}

TrainResult train(const data::CorpusSplit& split, const ModelConfig& cfg,
                  const EpochCallback& on_epoch) {
  if (split.train.empty()) throw EmptySplit("train set");
  if (split.validation.empty()) throw EmptySplit("validation set");

  std::vector<std::string> all = split.train;
  all.insert(all.end(), split.validation.begin(), split.validation.end());
  all.insert(all.end(), split.test.begin(), split.test.end());
  data::Vocabulary vocab = data::Vocabulary::build(all);

  auto train_seqs = data::encode_all(split.train, vocab, cfg.max_len);
  auto val_seqs = data::encode_all(split.validation, vocab, cfg.max_len);

  CdnModel model(cfg, vocab, cfg.seed);
  auto params = model.parameters();
  nn::AdamState adam = nn::AdamState::init(params);
  Rng rng(derive_seed(cfg.seed, 0x7261696eULL));  // training stream

  TrainResult result;
  float best_val = std::numeric_limits<float>::infinity();
  int epochs_since_best = 0;
  long global_step = 0;

  std::vector<int> order(train_seqs.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<float> noise(cfg.latent_dim);

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    // Fisher-Yates with the training RNG stream
    for (int i = static_cast<int>(order.size()) - 1; i > 0; --i)
      std::swap(order[i], order[rng.integer(i + 1)]);

    float lr = cfg.initial_learning_rate *
               std::pow(cfg.lr_decay_rate, static_cast<float>(epoch));
    double epoch_total = 0.0, epoch_recon = 0.0, epoch_kl = 0.0;
    float kl_weight = 0.0f;

    std::size_t cursor = 0;
    while (cursor < order.size()) {
      std::size_t batch_end =
          std::min(cursor + static_cast<std::size_t>(cfg.batch_size), order.size());
      int batch_n = static_cast<int>(batch_end - cursor);
      kl_weight = cfg.kl_weight_at(global_step);

      model.zero_grads();
      double batch_total = 0.0;
      for (std::size_t k = cursor; k < batch_end; ++k) {
        const auto& seq = train_seqs[order[k]];
        for (float& n : noise) n = static_cast<float>(rng.gaussian());
        nn::Tape tape;
        auto loss = model.build_loss(tape, seq, noise, kl_weight);
        float total = tape.value(loss.total)[0];
        if (!std::isfinite(total))
          throw DivergedLoss("non-finite loss at step " +
                             std::to_string(global_step) + ", epoch " +
                             std::to_string(epoch));
        batch_total += total;
        epoch_total += total;
        epoch_recon += tape.value(loss.reconstruction)[0];
        epoch_kl += tape.value(loss.kl)[0];
        tape.backward(loss.total);
      }
      float inv = 1.0f / static_cast<float>(batch_n);
      for (nn::Parameter* p : params) p->gradient.array() *= inv;
      nn::adam_step(params, adam, lr);
      result.step_losses.push_back(static_cast<float>(batch_total / batch_n));
      ++global_step;
      cursor = batch_end;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = lr;
    stats.kl_weight = kl_weight;
    auto n_train = static_cast<double>(train_seqs.size());
    stats.train_total = static_cast<float>(epoch_total / n_train);
    stats.train_reconstruction = static_cast<float>(epoch_recon / n_train);
    stats.train_kl = static_cast<float>(epoch_kl / n_train);
    stats.validation_reconstruction = validation_reconstruction(model, val_seqs);
    result.curve.push_back(stats);
    if (on_epoch) on_epoch(stats);
    result.stopped_after_epoch = epoch;

    if (stats.validation_reconstruction < best_val) {
      best_val = stats.validation_reconstruction;
      epochs_since_best = 0;
      result.best = Checkpoint::from_model(model, epoch, best_val);
    } else if (++epochs_since_best >= cfg.early_stop_patience) {
      break;
    }
  }

  if (result.best.blocks.empty())
    result.best = Checkpoint::from_model(model, result.stopped_after_epoch, best_val);
  return result;
}

}  // namespace cdn::model
