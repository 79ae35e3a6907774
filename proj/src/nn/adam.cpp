#include <cmath>

#include "cdn/nn/adam.hpp"

namespace cdn::nn {

AdamState AdamState::init(const std::vector<Parameter*>& params) {
  AdamState s;
  for (const Parameter* p : params)
    s.slots.push_back({Tensor::zeros(p->value.shape()),
                       Tensor::zeros(p->value.shape())});
  return s;
}

void adam_step(const std::vector<Parameter*>& params, AdamState& state,
               float learning_rate) {
  if (params.size() != state.slots.size()) throw StateShapeMismatch();
  state.step_count += 1;
  float t = static_cast<float>(state.step_count);
  float bc1 = 1.0f - std::pow(state.beta1, t);
  float bc2 = 1.0f - std::pow(state.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = *params[i];
    AdamState::Slot& slot = state.slots[i];
    if (!slot.first_moment.same_shape(p.value)) throw StateShapeMismatch();
    const auto& g = p.gradient.array();
    slot.first_moment.array() =
        state.beta1 * slot.first_moment.array() + (1.0f - state.beta1) * g;
    slot.second_moment.array() =
        state.beta2 * slot.second_moment.array() + (1.0f - state.beta2) * g * g;
    p.value.array() -= learning_rate * (slot.first_moment.array() / bc1) /
                       ((slot.second_moment.array() / bc2).sqrt() + state.epsilon);
  }
}

}  // namespace cdn::nn
