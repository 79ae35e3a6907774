#include <cmath>

#include "cdn/nn/grad_check.hpp"

namespace cdn::nn {

namespace {

double run_forward(const std::function<VarId(Tape&, const std::vector<VarId>&)>& op,
                   std::vector<Parameter>& inputs, const Tensor& weighting) {
  Tape tape;
  std::vector<VarId> vars;
  for (Parameter& p : inputs) vars.push_back(tape.param(p));
  VarId out = op(tape, vars);
  const Tensor& v = tape.value(out);
  double acc = 0.0;
  for (int i = 0; i < v.size(); ++i)
    acc += static_cast<double>(v[i]) * static_cast<double>(weighting[i]);
  return acc;
}

}  // namespace

GradCheckReport grad_check(
    const std::function<VarId(Tape&, const std::vector<VarId>&)>& op,
    const std::vector<std::vector<int>>& input_shapes, float tolerance,
    std::uint64_t seed, float fd_epsilon) {
  Rng rng(seed);
  std::vector<Parameter> inputs;
  for (std::size_t k = 0; k < input_shapes.size(); ++k) {
    Tensor t(input_shapes[k]);
    for (int i = 0; i < t.size(); ++i)
      t[i] = static_cast<float>(rng.gaussian() * 0.5);
    inputs.emplace_back("input#" + std::to_string(k), std::move(t));
  }

  // Probe the output shape, then fix the reduction weights.
  Tensor weighting;
  {
    Tape tape;
    std::vector<VarId> vars;
    for (Parameter& p : inputs) vars.push_back(tape.param(p));
    VarId out = op(tape, vars);
    weighting = Tensor(tape.value(out).shape());
    for (int i = 0; i < weighting.size(); ++i)
      weighting[i] = static_cast<float>(rng.gaussian());
  }

  // Analytic gradients via one backward pass on the weighted sum.
  {
    Tape tape;
    std::vector<VarId> vars;
    for (Parameter& p : inputs) {
      p.zero_grad();
      vars.push_back(tape.param(p));
    }
    VarId out = op(tape, vars);
    VarId w = tape.constant(weighting);
    VarId prod = mul(tape, out, w);
    VarId loss = tape.make(
        Tensor::scalar(tape.value(prod).array().sum()), {prod},
        [prod](Tape& tp, VarId self) {
          tp.grad(prod).array() += tp.grad(self)[0];
        });
    tape.backward(loss);
  }

  GradCheckReport report;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    Parameter& p = inputs[k];
    // Relative error is scaled against the gradient magnitude of the whole
    // input tensor; per-element denominators near zero only measure
    // float32 rounding noise, not gradient correctness.
    float scale = std::max(1e-2f, p.gradient.array().abs().maxCoeff());
    for (int i = 0; i < p.value.size(); ++i) {
      float saved = p.value[i];
      // The perturbed values round to float32; use the realized step width.
      float up_x = saved + fd_epsilon;
      float down_x = saved - fd_epsilon;
      p.value[i] = up_x;
      double up = run_forward(op, inputs, weighting);
      p.value[i] = down_x;
      double down = run_forward(op, inputs, weighting);
      p.value[i] = saved;
      double numeric = (up - down) / (static_cast<double>(up_x) - down_x);
      double analytic = p.gradient[i];
      double rel = std::abs(analytic - numeric) /
                   std::max({std::abs(analytic), std::abs(numeric),
                             static_cast<double>(scale)});
      if (rel > report.max_rel_error) {
        report.max_rel_error = static_cast<float>(rel);
        report.worst_input = p.name + "[" + std::to_string(i) + "]";
      }
    }
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

}  // namespace cdn::nn
