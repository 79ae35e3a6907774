#include <algorithm>
#include <cmath>

#include "cdn/model/model.hpp"
#include "cdn/smiles/smiles.hpp"
#include "json.hpp"

namespace cdn::model {

std::string ModelConfig::to_json() const {
  nlohmann::json j{{"max_len", max_len},
                   {"embed_dim", embed_dim},
                   {"filter_widths", filter_widths},
                   {"filters_per_width", filters_per_width},
                   {"latent_dim", latent_dim},
                   {"lstm_units", lstm_units},
                   {"batch_size", batch_size},
                   {"initial_learning_rate", initial_learning_rate},
                   {"lr_decay_rate", lr_decay_rate},
                   {"kl_weight_start", kl_weight_start},
                   {"kl_weight_max", kl_weight_max},
                   {"kl_ramp_steps", kl_ramp_steps},
                   {"early_stop_patience", early_stop_patience},
                   {"max_epochs", max_epochs},
                   {"seed", seed}};
  return j.dump(2);
}

ModelConfig ModelConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ModelConfig c;
  j.at("max_len").get_to(c.max_len);
  j.at("embed_dim").get_to(c.embed_dim);
  j.at("filter_widths").get_to(c.filter_widths);
  j.at("filters_per_width").get_to(c.filters_per_width);
  j.at("latent_dim").get_to(c.latent_dim);
  j.at("lstm_units").get_to(c.lstm_units);
  j.at("batch_size").get_to(c.batch_size);
  j.at("initial_learning_rate").get_to(c.initial_learning_rate);
  j.at("lr_decay_rate").get_to(c.lr_decay_rate);
  j.at("kl_weight_start").get_to(c.kl_weight_start);
  if (j.contains("kl_weight_max")) j.at("kl_weight_max").get_to(c.kl_weight_max);
  j.at("kl_ramp_steps").get_to(c.kl_ramp_steps);
  j.at("early_stop_patience").get_to(c.early_stop_patience);
  j.at("max_epochs").get_to(c.max_epochs);
  j.at("seed").get_to(c.seed);
  return c;
}

void ModelConfig::apply_override(const std::string& key, const std::string& value) {
  auto as_int = [&] { return std::stoi(value); };
  auto as_float = [&] { return std::stof(value); };
  if (key == "max_len") max_len = as_int();
  else if (key == "embed_dim") embed_dim = as_int();
  else if (key == "filters_per_width") filters_per_width = as_int();
  else if (key == "latent_dim") latent_dim = as_int();
  else if (key == "lstm_units") lstm_units = as_int();
  else if (key == "batch_size") batch_size = as_int();
  else if (key == "initial_learning_rate") initial_learning_rate = as_float();
  else if (key == "lr_decay_rate") lr_decay_rate = as_float();
  else if (key == "kl_weight_start") kl_weight_start = as_float();
  else if (key == "kl_weight_max") kl_weight_max = as_float();
  else if (key == "kl_ramp_steps") kl_ramp_steps = std::stol(value);
  else if (key == "early_stop_patience") early_stop_patience = as_int();
  else if (key == "max_epochs") max_epochs = as_int();
  else if (key == "seed") seed = std::stoull(value);
  else if (key == "filter_widths") {
    filter_widths.clear();
    std::size_t pos = 0;
    while (pos < value.size()) {
      std::size_t next = value.find(',', pos);
      if (next == std::string::npos) next = value.size();
      filter_widths.push_back(std::stoi(value.substr(pos, next - pos)));
      pos = next + 1;
    }
  } else {
    throw std::runtime_error("unknown config key: " + key);
  }
}

namespace {

constexpr float kLogSigmaClamp = 8.0f;

nn::Tensor uniform_init(std::vector<int> shape, float bound, Rng& rng) {
  nn::Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i)
    t[i] = static_cast<float>((rng.uniform() * 2.0 - 1.0) * bound);
  return t;
}

nn::Tensor truncated_normal_init(std::vector<int> shape, float stddev, Rng& rng) {
  nn::Tensor t(std::move(shape));
  for (int i = 0; i < t.size(); ++i) {
    double z;
    do {
      z = rng.gaussian();
    } while (std::abs(z) > 2.0);
    t[i] = static_cast<float>(z * stddev);
  }
  return t;
}

nn::Tensor xavier_init(std::vector<int> shape, Rng& rng) {
  int fan_in = shape.size() == 2 ? shape[1] : shape[0];
  int fan_out = shape[0];
  float bound = std::sqrt(6.0f / static_cast<float>(fan_in + fan_out));
  return uniform_init(std::move(shape), bound, rng);
}

}  // namespace

DecoderMode decoder_mode_from_string(const std::string& s) {
  if (s == "argmax") return DecoderMode::Argmax;
  if (s == "sampling") return DecoderMode::Sampling;
  throw std::runtime_error("unknown decoder mode: " + s);
}

std::string to_string(DecoderMode m) {
  return m == DecoderMode::Argmax ? "argmax" : "sampling";
}

CdnModel::CdnModel(ModelConfig cfg, data::Vocabulary vocab, std::uint64_t init_seed)
    : cfg_(std::move(cfg)), vocab_(std::move(vocab)) {
  Rng rng(init_seed);
  int v = vocab_.size();
  int d = cfg_.embed_dim;
  int u = cfg_.lstm_units;
  int dz = cfg_.latent_dim;
  int tf = total_filters();

  embedding_ = nn::Parameter("embedding", uniform_init({v, d}, 0.1f, rng));
  for (int w : cfg_.filter_widths) {
    conv_w_.emplace_back(
        "conv_w" + std::to_string(w),
        truncated_normal_init({cfg_.filters_per_width, w * d}, 0.1f, rng));
    conv_b_.emplace_back("conv_b" + std::to_string(w),
                         nn::Tensor({cfg_.filters_per_width}));
  }
  w_mu_ = nn::Parameter("w_mu", xavier_init({dz, tf}, rng));
  b_mu_ = nn::Parameter("b_mu", nn::Tensor({dz}));
  w_ls_ = nn::Parameter("w_log_sigma", xavier_init({dz, tf}, rng));
  b_ls_ = nn::Parameter("b_log_sigma", nn::Tensor({dz}));
  w_proj_ = nn::Parameter("w_proj", xavier_init({2 * u, dz}, rng));
  b_proj_ = nn::Parameter("b_proj", nn::Tensor({2 * u}));
  wx_ = nn::Parameter("lstm_wx", xavier_init({4 * u, d}, rng));
  wh_ = nn::Parameter("lstm_wh", xavier_init({4 * u, u}, rng));
  b_lstm_ = nn::Parameter("lstm_b", nn::Tensor({4 * u}));
  w_out_ = nn::Parameter("w_out", xavier_init({v, u}, rng));
  b_out_ = nn::Parameter("b_out", nn::Tensor({v}));
}

std::vector<nn::Parameter*> CdnModel::parameters() {
  std::vector<nn::Parameter*> ps{&embedding_};
  for (auto& p : conv_w_) ps.push_back(&p);
  for (auto& p : conv_b_) ps.push_back(&p);
  for (nn::Parameter* p : {&w_mu_, &b_mu_, &w_ls_, &b_ls_, &w_proj_, &b_proj_,
                           &wx_, &wh_, &b_lstm_, &w_out_, &b_out_})
    ps.push_back(p);
  return ps;
}

std::vector<const nn::Parameter*> CdnModel::parameters() const {
  auto ps = const_cast<CdnModel*>(this)->parameters();
  return {ps.begin(), ps.end()};
}

void CdnModel::zero_grads() {
  for (nn::Parameter* p : parameters()) p->zero_grad();
}

nn::Parameter* CdnModel::find_parameter(const std::string& name) {
  for (nn::Parameter* p : parameters())
    if (p->name == name) return p;
  return nullptr;
}

Eigen::VectorXf CdnModel::embed_row(int id) const {
  int d = cfg_.embed_dim;
  return Eigen::Map<const Eigen::VectorXf>(embedding_.value.data() + id * d, d);
}

LatentGaussian CdnModel::encode(const data::EncodedSequence& seq) const {
  int L = cfg_.seq_len();
  if (static_cast<int>(seq.indices.size()) != L)
    throw VocabularyMismatch("encoded sequence length does not match config");
  int d = cfg_.embed_dim;
  nn::MatrixRM emb(L, d);
  for (int i = 0; i < L; ++i) {
    int id = seq.indices[i];
    if (id < 0 || id >= vocab_.size())
      throw VocabularyMismatch("token index out of range");
    emb.row(i) = embed_row(id);
  }

  Eigen::VectorXf features(total_filters());
  int off = 0;
  for (std::size_t wi = 0; wi < cfg_.filter_widths.size(); ++wi) {
    int w = cfg_.filter_widths[wi];
    int windows = L - w + 1;
    const auto& fw = conv_w_[wi].value;
    const auto& fb = conv_b_[wi].value;
    Eigen::VectorXf pooled =
        Eigen::VectorXf::Constant(cfg_.filters_per_width,
                                  -std::numeric_limits<float>::infinity());
    for (int pos = 0; pos < windows; ++pos) {
      Eigen::Map<const Eigen::VectorXf> window(emb.data() + pos * d, w * d);
      Eigen::VectorXf act = fw.matrix() * window + fb.vector();
      pooled = pooled.cwiseMax(act);
    }
    features.segment(off, cfg_.filters_per_width) = pooled;
    off += cfg_.filters_per_width;
  }

  LatentGaussian g;
  g.mu = nn::Tensor({cfg_.latent_dim});
  g.log_sigma = nn::Tensor({cfg_.latent_dim});
  g.mu.vector() = w_mu_.value.matrix() * features + b_mu_.value.vector();
  g.log_sigma.vector() = w_ls_.value.matrix() * features + b_ls_.value.vector();
  g.log_sigma.array() =
      g.log_sigma.array().min(kLogSigmaClamp).max(-kLogSigmaClamp);
  return g;
}

nn::Tensor CdnModel::diverse_sample(const LatentGaussian& g, double diversity,
                                    Rng& rng) const {
  // z = n * sigma + mu with n ~ N(0, D): elementwise variance sigma^2 * D.
  nn::Tensor z({cfg_.latent_dim});
  double spread = std::sqrt(diversity);
  for (int i = 0; i < z.size(); ++i) {
    double n = rng.gaussian() * spread;
    z[i] = static_cast<float>(g.mu[i] + n * std::exp(g.log_sigma[i]));
  }
  return z;
}

void CdnModel::decoder_init_plain(const nn::Tensor& z, Eigen::VectorXf& h,
                                  Eigen::VectorXf& c) const {
  int u = cfg_.lstm_units;
  Eigen::VectorXf hc = w_proj_.value.matrix() * z.vector() + b_proj_.value.vector();
  h = hc.head(u);
  c = hc.tail(u);
}

void CdnModel::lstm_step_plain(const Eigen::VectorXf& x, Eigen::VectorXf& h,
                               Eigen::VectorXf& c) const {
  int u = cfg_.lstm_units;
  Eigen::VectorXf gates = wx_.value.matrix() * x + wh_.value.matrix() * h +
                          b_lstm_.value.vector();
  auto sig = [](float v) { return 1.0f / (1.0f + std::exp(-v)); };
  for (int j = 0; j < u; ++j) {
    float gi = sig(gates[j]);
    float gf = sig(gates[u + j]);
    float gg = std::tanh(gates[2 * u + j]);
    float go = sig(gates[3 * u + j]);
    c[j] = gf * c[j] + gi * gg;
    h[j] = go * std::tanh(c[j]);
  }
}

std::pair<std::vector<nn::Tensor>, LossBreakdown> CdnModel::decode_teacher_forced(
    const nn::Tensor& z, const data::EncodedSequence& target,
    const LatentGaussian& latent, float kl_weight) const {
  Eigen::VectorXf h, c;
  decoder_init_plain(z, h, c);
  int steps = target.true_length + 1;  // predict tokens 1..END
  std::vector<nn::Tensor> logits;
  logits.reserve(steps);
  double ce_sum = 0.0;
  for (int i = 1; i <= steps; ++i) {
    lstm_step_plain(embed_row(target.indices[i - 1]), h, c);
    nn::Tensor step({vocab_.size()});
    step.vector() = w_out_.value.matrix() * h + b_out_.value.vector();
    // stabilized cross-entropy against the gold token
    float zmax = step.array().maxCoeff();
    double lse = std::log((step.array() - zmax).exp().sum()) + zmax;
    ce_sum += lse - step[target.indices[i]];
    logits.push_back(std::move(step));
  }
  LossBreakdown loss;
  loss.reconstruction = static_cast<float>(ce_sum / steps);
  loss.kl = 0.5f * (latent.mu.array().square() +
                    (2.0f * latent.log_sigma.array()).exp() -
                    2.0f * latent.log_sigma.array() - 1.0f)
                       .sum();
  loss.total = loss.reconstruction + kl_weight * loss.kl;
  return {std::move(logits), loss};
}

std::string CdnModel::generate(const nn::Tensor& z, DecoderMode mode,
                               Rng& rng) const {
  Eigen::VectorXf h, c;
  decoder_init_plain(z, h, c);
  std::string out;
  int prev = data::Vocabulary::kStart;
  for (int step = 0; step <= cfg_.max_len; ++step) {
    lstm_step_plain(embed_row(prev), h, c);
    nn::Tensor logits({vocab_.size()});
    logits.vector() = w_out_.value.matrix() * h + b_out_.value.vector();
    int tok;
    if (mode == DecoderMode::Argmax) {
      logits.array().maxCoeff(&tok);
    } else {
      nn::Tensor probs = nn::softmax(logits);
      double r = rng.uniform();
      double acc = 0.0;
      tok = probs.size() - 1;
      for (int i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (r < acc) {
          tok = i;
          break;
        }
      }
    }
    if (tok == data::Vocabulary::kEnd) break;
    if (tok >= 4) out += vocab_.token(tok);  // specials stripped
    prev = tok;
  }
  return out;
}

std::vector<std::string> CdnModel::generate_from_prototype(
    const std::string& prototype, const DiversityConfig& dc) const {
  data::EncodedSequence seq = data::encode(prototype, vocab_, cfg_.max_len);
  LatentGaussian g = encode(seq);
  std::vector<std::string> out;
  out.reserve(dc.samples);
  for (int i = 0; i < dc.samples; ++i) {
    Rng rng(derive_seed(dc.seed, static_cast<std::uint64_t>(i)));
    nn::Tensor z = diverse_sample(g, dc.diversity, rng);
    out.push_back(generate(z, dc.decoder_mode, rng));
  }
  return out;
}

std::string CdnModel::generate_unconditional(Rng& rng, DecoderMode mode) const {
  nn::Tensor z({cfg_.latent_dim});
  for (int i = 0; i < z.size(); ++i) z[i] = static_cast<float>(rng.gaussian());
  return generate(z, mode, rng);
}

CdnModel::LossVars CdnModel::build_loss(nn::Tape& tape,
                                        const data::EncodedSequence& seq,
                                        const std::vector<float>& noise,
                                        float kl_weight) {
  using namespace nn;
  if (static_cast<int>(noise.size()) != cfg_.latent_dim)
    throw ShapeMismatch("noise vector length");
  int u = cfg_.lstm_units;

  // encoder
  VarId table = tape.param(embedding_);
  VarId emb = embedding_seq(tape, table, seq.indices);
  std::vector<VarId> ws, bs;
  for (std::size_t i = 0; i < conv_w_.size(); ++i) {
    ws.push_back(tape.param(conv_w_[i]));
    bs.push_back(tape.param(conv_b_[i]));
  }
  VarId features = conv1d_bank(tape, emb, cfg_.filter_widths, ws, bs);
  VarId mu = affine(tape, tape.param(w_mu_), features, tape.param(b_mu_));
  VarId log_sigma = clamp(
      tape, affine(tape, tape.param(w_ls_), features, tape.param(b_ls_)),
      -kLogSigmaClamp, kLogSigmaClamp);

  // reparameterized sample with caller-provided noise
  VarId sigma = exp_op(tape, log_sigma);
  VarId nvar = tape.constant(Tensor::from({cfg_.latent_dim}, noise));
  VarId z = add(tape, mu, mul(tape, sigma, nvar));

  // decoder
  VarId hc = affine(tape, tape.param(w_proj_), z, tape.param(b_proj_));
  VarId h = slice(tape, hc, 0, u);
  VarId c = slice(tape, hc, u, u);
  LstmCellParams cell{tape.param(wx_), tape.param(wh_), tape.param(b_lstm_), u};
  VarId w_out = tape.param(w_out_);
  VarId b_out = tape.param(b_out_);

  int steps = seq.true_length + 1;
  VarId ce_sum = tape.constant(Tensor::scalar(0.0f));
  for (int i = 1; i <= steps; ++i) {
    VarId x = embedding_lookup(tape, table, seq.indices[i - 1]);
    std::tie(h, c) = lstm_cell_step(tape, x, h, c, cell);
    VarId logits = affine(tape, w_out, h, b_out);
    ce_sum = add(tape, ce_sum, softmax_cross_entropy(tape, logits, seq.indices[i]));
  }
  VarId recon = scale(tape, ce_sum, 1.0f / static_cast<float>(steps));
  VarId kl = kl_gaussian_to_standard(tape, mu, log_sigma);
  VarId total = add(tape, recon, scale(tape, kl, kl_weight));
  return {total, recon, kl};
}

}  // namespace cdn::model
