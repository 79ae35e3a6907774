#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdn::nn {

class ShapeMismatch : public std::runtime_error {
public:
  explicit ShapeMismatch(const std::string& what)
      : std::runtime_error("shape mismatch: " + what) {}
};

class IndexOutOfRange : public std::runtime_error {
public:
  explicit IndexOutOfRange(const std::string& what)
      : std::runtime_error("index out of range: " + what) {}
};

using MatrixRM = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Dense row-major float32 tensor; rank 1 and 2 are all the architecture needs.
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(std::vector<int> shape);
  static Tensor zeros(std::vector<int> shape) { return Tensor(std::move(shape)); }
  static Tensor from(std::vector<int> shape, std::vector<float> values);
  static Tensor scalar(float v);

  const std::vector<int>& shape() const { return shape_; }
  int size() const { return static_cast<int>(data_.size()); }
  int rank() const { return static_cast<int>(shape_.size()); }
  int rows() const { return shape_.at(0); }
  int cols() const { return shape_.at(1); }

  Eigen::ArrayXf& array() { return data_; }
  const Eigen::ArrayXf& array() const { return data_; }
  float* data() { return data_.data(); }
  const float* data() const { return data_.data(); }

  float& operator[](int i) { return data_[i]; }
  float operator[](int i) const { return data_[i]; }
  float& at(int r, int c) { return data_[r * cols() + c]; }
  float at(int r, int c) const { return data_[r * cols() + c]; }

  Eigen::Map<MatrixRM> matrix() {
    return Eigen::Map<MatrixRM>(data_.data(), rows(), cols());
  }
  Eigen::Map<const MatrixRM> matrix() const {
    return Eigen::Map<const MatrixRM>(data_.data(), rows(), cols());
  }
  Eigen::Map<Eigen::VectorXf> vector() {
    return Eigen::Map<Eigen::VectorXf>(data_.data(), data_.size());
  }
  Eigen::Map<const Eigen::VectorXf> vector() const {
    return Eigen::Map<const Eigen::VectorXf>(data_.data(), data_.size());
  }

  void set_zero() { data_.setZero(); }
  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const { return data_.isFinite().all(); }

private:
  std::vector<int> shape_;
  Eigen::ArrayXf data_;
};

struct Parameter {
  Tensor value;
  Tensor gradient;  // same shape, zeroed at the start of each step
  std::string name;

  Parameter() = default;
  Parameter(std::string n, Tensor v)
      : value(std::move(v)), gradient(Tensor::zeros(value.shape())),
        name(std::move(n)) {}
  void zero_grad() { gradient.set_zero(); }
};

}  // namespace cdn::nn
