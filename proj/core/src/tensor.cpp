#include "hcprune/tensor.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace hcprune {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string shape_to_string(const std::vector<std::size_t>& shape) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << "x";
    os << shape[i];
  }
  os << ")";
  return os.str();
}

void require_2d(const Tensor& t, const char* op) {
  if (t.rank() != 2) shape_error(op, "expected rank-2 tensor, got " + t.shape_str());
}

}  // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_product(shape_)) {
    shape_error("Tensor", "data length " + std::to_string(data_.size()) +
                              " does not match shape " + shape_str());
  }
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::full(std::vector<std::size_t> shape, double v) {
  Tensor t(std::move(shape));
  t.fill(v);
  return t;
}

std::size_t Tensor::rows() const {
  if (rank() != 2) shape_error("rows", "expected rank-2 tensor, got " + shape_str());
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) shape_error("cols", "expected rank-2 tensor, got " + shape_str());
  return shape_[1];
}

double Tensor::item() const {
  if (data_.size() != 1) shape_error("item", "expected scalar, got " + shape_str());
  return data_[0];
}

bool Tensor::all_finite() const {
  for (double v : data_)
    if (!std::isfinite(v)) return false;
  return true;
}

std::string Tensor::shape_str() const { return shape_to_string(shape_); }

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

void Tensor::add_inplace(const Tensor& other) {
  if (!same_shape(other)) shape_error("add_inplace", *this, other);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
}

void shape_error(const std::string& op, const Tensor& a, const Tensor& b) {
  throw std::runtime_error("hcprune: " + op + ": shape mismatch " + a.shape_str() + " vs " +
                           b.shape_str());
}

void shape_error(const std::string& op, const std::string& detail) {
  throw std::runtime_error("hcprune: " + op + ": " + detail);
}

// ---------------------------------------------------------------------------
// kernels

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul");
  require_2d(b, "matmul");
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor c({m, n});
  const double* pa = a.data();
  const double* pb = b.data();
  double* pc = c.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = pa + i * k;
    double* crow = pc + i * n;
    for (std::size_t l = 0; l < k; ++l) {
      const double av = arow[l];
      const double* brow = pb + l * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul_nt");
  require_2d(b, "matmul_nt");
  if (a.cols() != b.cols()) shape_error("matmul_nt", a, b);
  const std::size_t m = a.rows(), k = a.cols(), n = b.rows();
  Tensor c({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a.data() + i * k;
    double* crow = c.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b.data() + j * k;
      double acc = 0.0;
      for (std::size_t l = 0; l < k; ++l) acc += arow[l] * brow[l];
      crow[j] = acc;
    }
  }
  return c;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require_2d(a, "matmul_tn");
  require_2d(b, "matmul_tn");
  if (a.rows() != b.rows()) shape_error("matmul_tn", a, b);
  const std::size_t m = a.cols(), k = a.rows(), n = b.cols();
  Tensor c({m, n});
  for (std::size_t l = 0; l < k; ++l) {
    const double* arow = a.data() + l * m;
    const double* brow = b.data() + l * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = arow[i];
      double* crow = c.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Tensor transpose(const Tensor& a) {
  require_2d(a, "transpose");
  const std::size_t m = a.rows(), n = a.cols();
  Tensor t({n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) t.at(j, i) = a.at(i, j);
  return t;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("add", a, b);
  Tensor c = a;
  c.add_inplace(b);
  return c;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("sub", a, b);
  Tensor c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
  return c;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("mul", a, b);
  Tensor c = a;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= b[i];
  return c;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= c;
  return out;
}

Tensor add_scalar(const Tensor& a, double c) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += c;
  return out;
}

Tensor add_rowvec(const Tensor& a, const Tensor& v) {
  require_2d(a, "add_rowvec");
  if (v.size() != a.cols()) shape_error("add_rowvec", a, v);
  Tensor out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) += v[j];
  return out;
}

Tensor mul_rowvec(const Tensor& a, const Tensor& v) {
  require_2d(a, "mul_rowvec");
  if (v.size() != a.cols()) shape_error("mul_rowvec", a, v);
  Tensor out = a;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out.at(i, j) *= v[j];
  return out;
}

Tensor softmax_rows(const Tensor& a) {
  require_2d(a, "softmax_rows");
  Tensor out = a;
  const std::size_t n = a.cols();
  if (n == 0) return out;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* row = out.data() + i * n;
    double mx = row[0];
    for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = std::exp(row[j] - mx);
      z += row[j];
    }
    for (std::size_t j = 0; j < n; ++j) row[j] /= z;
  }
  return out;
}

double sigmoid_scalar(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor sigmoid(const Tensor& a) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = sigmoid_scalar(out[i]);
  return out;
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

double gelu_scalar(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

double gelu_grad_scalar(double x) {
  const double g = kGeluC * (x + kGeluA * x * x * x);
  const double t = std::tanh(g);
  const double dg = kGeluC * (1.0 + 3.0 * kGeluA * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * dg;
}

Tensor gelu(const Tensor& a) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = gelu_scalar(out[i]);
  return out;
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::min(hi, std::max(lo, out[i]));
  return out;
}

Tensor normalize_rows(const Tensor& a, double eps) {
  require_2d(a, "normalize_rows");
  const std::size_t n = a.cols();
  if (n == 0) shape_error("normalize_rows", "zero-width rows");
  Tensor out = a;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* row = out.data() + i * n;
    double m = 0.0;
    for (std::size_t j = 0; j < n; ++j) m += row[j];
    m /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = row[j] - m;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) row[j] = (row[j] - m) * inv;
  }
  return out;
}

Tensor concat_cols(const std::vector<const Tensor*>& parts) {
  if (parts.empty()) shape_error("concat_cols", "no inputs");
  const std::size_t m = parts[0]->rows();
  std::size_t n = 0;
  for (const Tensor* p : parts) {
    if (p->rows() != m) shape_error("concat_cols", *parts[0], *p);
    n += p->cols();
  }
  Tensor out({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    double* dst = out.data() + i * n;
    for (const Tensor* p : parts) {
      const std::size_t w = p->cols();
      const double* src = p->data() + i * w;
      for (std::size_t j = 0; j < w; ++j) dst[j] = src[j];
      dst += w;
    }
  }
  return out;
}

double mse(const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) shape_error("mse", a, b);
  if (a.empty()) shape_error("mse", "empty tensors");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

double sum(const Tensor& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i];
  return acc;
}

double mean(const Tensor& a) {
  if (a.empty()) shape_error("mean", "empty tensor");
  return sum(a) / static_cast<double>(a.size());
}

}  // namespace hcprune
