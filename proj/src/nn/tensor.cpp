#include "cdn/nn/tensor.hpp"

namespace cdn::nn {

namespace {
int product(const std::vector<int>& shape) {
  int n = 1;
  for (int d : shape) {
    if (d <= 0) throw ShapeMismatch("non-positive dimension");
    n *= d;
  }
  return n;
}
}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_ = Eigen::ArrayXf::Zero(product(shape_));
}

Tensor Tensor::from(std::vector<int> shape, std::vector<float> values) {
  Tensor t(std::move(shape));
  if (static_cast<int>(values.size()) != t.size())
    throw ShapeMismatch("value count does not match shape");
  for (int i = 0; i < t.size(); ++i) t.data_[i] = values[i];
  return t;
}

Tensor Tensor::scalar(float v) {
  Tensor t({1});
  t.data_[0] = v;
  return t;
}

}  // namespace cdn::nn
