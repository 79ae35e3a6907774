#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cdn/nn/ops.hpp"

namespace cdn::nn {

struct GradCheckReport {
  float max_rel_error = 0.0f;
  bool passed = false;
  std::string worst_input;  // "input#k[i]" of the worst element
};

// Compares analytic gradients against central finite differences at randomly
// seeded inputs. Non-scalar op outputs are reduced to a scalar by a fixed
// random weighting so a single backward pass covers every output element.
GradCheckReport grad_check(
    const std::function<VarId(Tape&, const std::vector<VarId>&)>& op,
    const std::vector<std::vector<int>>& input_shapes, float tolerance,
    std::uint64_t seed, float fd_epsilon = 5e-3f);

}  // namespace cdn::nn
