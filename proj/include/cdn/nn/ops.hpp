#pragma once

#include <utility>
#include <vector>

#include "cdn/nn/tape.hpp"
#include "cdn/rng.hpp"

namespace cdn::nn {

// Elementwise / structural
VarId add(Tape& t, VarId a, VarId b);
VarId mul(Tape& t, VarId a, VarId b);
VarId scale(Tape& t, VarId a, float s);
VarId relu(Tape& t, VarId a);
VarId tanh_op(Tape& t, VarId a);
VarId sigmoid(Tape& t, VarId a);
VarId exp_op(Tape& t, VarId a);
VarId clamp(Tape& t, VarId a, float lo, float hi);
VarId concat(Tape& t, const std::vector<VarId>& parts);
VarId slice(Tape& t, VarId a, int start, int len);

// Linear algebra
VarId matmul(Tape& t, VarId a, VarId b);
// W [out x in] * x [in] + b [out]
VarId affine(Tape& t, VarId w, VarId x, VarId b);

// Embedding
VarId embedding_lookup(Tape& t, VarId table, int row);
VarId embedding_seq(Tape& t, VarId table, const std::vector<int>& rows);

// Valid 1-D convolution over the sequence axis with max-over-time pooling,
// one (weights, bias) pair per filter width; weights[w] is
// [filters x (width*embed_dim)], outputs concatenated across widths.
VarId conv1d_bank(Tape& t, VarId x, const std::vector<int>& widths,
                  const std::vector<VarId>& weights,
                  const std::vector<VarId>& biases);

struct LstmCellParams {
  VarId wx;  // [4*units x in_dim], gate order i,f,g,o
  VarId wh;  // [4*units x units]
  VarId b;   // [4*units]
  int units;
};
std::pair<VarId, VarId> lstm_cell_step(Tape& t, VarId x, VarId h, VarId c,
                                       const LstmCellParams& p);

// Losses
VarId softmax_cross_entropy(Tape& t, VarId logits, int target_index);
VarId kl_gaussian_to_standard(Tape& t, VarId mu, VarId log_sigma);

// Forward-only helpers (no tape)
Tensor softmax(const Tensor& logits);

}  // namespace cdn::nn
