#pragma once

#include <vector>

#include "cdn/nn/tensor.hpp"

namespace cdn::nn {

class StateShapeMismatch : public std::runtime_error {
public:
  StateShapeMismatch() : std::runtime_error("Adam state/parameter shape mismatch") {}
};

struct AdamState {
  struct Slot {
    Tensor first_moment;
    Tensor second_moment;
  };
  std::vector<Slot> slots;
  long step_count = 0;
  float beta1 = 0.9f;
  float beta2 = 0.999f;
  float epsilon = 1e-8f;

  static AdamState init(const std::vector<Parameter*>& params);
};

// Bias-corrected Adam update, applied in place; gradients must already be
// populated by a backward pass.
void adam_step(const std::vector<Parameter*>& params, AdamState& state,
               float learning_rate);

}  // namespace cdn::nn
