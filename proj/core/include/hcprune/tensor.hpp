#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hcprune {

// Dense row-major tensor of 64-bit floats. Rank 0 is not used; scalars are
// shape {1}. Dimensions of size 0 are legal (empty tensors show up in
// compacted models whose sublayers lost every column).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor scalar(double v);
  static Tensor zeros(std::vector<std::size_t> shape) { return Tensor(std::move(shape)); }
  static Tensor full(std::vector<std::size_t> shape, double v);
  static Tensor ones(std::vector<std::size_t> shape) { return full(std::move(shape), 1.0); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // 2-d accessors; rows()/cols() require rank 2.
  std::size_t rows() const;
  std::size_t cols() const;
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& vec() { return data_; }
  const std::vector<double>& vec() const { return data_; }

  bool is_scalar() const { return data_.size() == 1; }
  double item() const;  // throws unless size()==1

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
  bool all_finite() const;
  std::string shape_str() const;

  void fill(double v);
  void add_inplace(const Tensor& other);  // same shape

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

[[noreturn]] void shape_error(const std::string& op, const Tensor& a, const Tensor& b);
[[noreturn]] void shape_error(const std::string& op, const std::string& detail);

// Raw tensor math used by both the autograd layer and the graph-free
// inference path. All functions validate shapes and throw std::runtime_error
// naming the op and the offending shapes.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a * b^T
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T * b
Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double c);
Tensor add_scalar(const Tensor& a, double c);
Tensor add_rowvec(const Tensor& a, const Tensor& v);  // v added to every row
Tensor mul_rowvec(const Tensor& a, const Tensor& v);  // right-multiply by diag(v)
Tensor softmax_rows(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor gelu(const Tensor& a);  // tanh approximation
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor normalize_rows(const Tensor& a, double eps);  // (x - mean) / sqrt(var + eps)
Tensor concat_cols(const std::vector<const Tensor*>& parts);
double mse(const Tensor& a, const Tensor& b);
double sum(const Tensor& a);
double mean(const Tensor& a);

double gelu_scalar(double x);
double gelu_grad_scalar(double x);
double sigmoid_scalar(double x);

}  // namespace hcprune
