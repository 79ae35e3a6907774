#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "cdn/nn/tensor.hpp"

namespace cdn::nn {

class Tape;
using VarId = int;

// Reverse-mode tape. Forward ops append nodes; backward() walks the node
// list in reverse, accumulating gradients. Parameter leaves flush their
// accumulated gradient into Parameter::gradient so it survives the tape.
class Tape {
public:
  VarId constant(Tensor value);
  VarId param(Parameter& p);

  const Tensor& value(VarId id) const { return nodes_[id].value; }
  Tensor& grad(VarId id) { return nodes_[id].grad; }
  const Tensor& grad(VarId id) const { return nodes_[id].grad; }

  // Internal: used by op implementations. backward receives the tape and
  // the node's own id and must add into the parents' grads.
  VarId make(Tensor value, std::vector<VarId> parents,
             std::function<void(Tape&, VarId)> backward);

  // Seed d(root)=1 and propagate; root must be a scalar.
  void backward(VarId root);

  std::size_t node_count() const { return nodes_.size(); }

private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<VarId> parents;
    std::function<void(Tape&, VarId)> back;
    Parameter* parameter = nullptr;
  };
  std::vector<Node> nodes_;
};

}  // namespace cdn::nn
