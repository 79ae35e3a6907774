#include "cdn/nn/tape.hpp"

namespace cdn::nn {

VarId Tape::constant(Tensor value) {
  Node n;
  n.grad = Tensor::zeros(value.shape());
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return static_cast<VarId>(nodes_.size() - 1);
}

VarId Tape::param(Parameter& p) {
  Node n;
  n.value = p.value;
  n.grad = Tensor::zeros(p.value.shape());
  n.parameter = &p;
  nodes_.push_back(std::move(n));
  return static_cast<VarId>(nodes_.size() - 1);
}

VarId Tape::make(Tensor value, std::vector<VarId> parents,
                 std::function<void(Tape&, VarId)> backward) {
  Node n;
  n.grad = Tensor::zeros(value.shape());
  n.value = std::move(value);
  n.parents = std::move(parents);
  n.back = std::move(backward);
  nodes_.push_back(std::move(n));
  return static_cast<VarId>(nodes_.size() - 1);
}

void Tape::backward(VarId root) {
  if (nodes_[root].value.size() != 1)
    throw ShapeMismatch("backward root must be a scalar");
  nodes_[root].grad[0] = 1.0f;
  for (VarId id = root; id >= 0; --id) {
    Node& n = nodes_[id];
    if (n.back) n.back(*this, id);
    if (n.parameter) n.parameter->gradient.array() += n.grad.array();
  }
}

}  // namespace cdn::nn
