#include "causalmamba/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "causalmamba/error.hpp"

namespace causalmamba {

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> values) : shape_(std::move(shape)), data_(std::move(values)) {
  if (data_.size() != shape_size(shape_))
    throw Error(Errc::ShapeMismatch, "value count " + std::to_string(data_.size()) + " does not match shape " +
                                         shape_string(shape_));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::initializer_list<double> values) {
  return Tensor({rows, cols}, std::vector<double>(values));
}

double Tensor::item() const {
  if (data_.size() != 1) throw Error(Errc::ShapeMismatch, "item() on tensor of shape " + shape_string(shape_));
  return data_[0];
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor Tensor::reshaped(Shape shape) const {
  if (shape_size(shape) != data_.size())
    throw Error(Errc::ShapeMismatch, "cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
  return Tensor(std::move(shape), data_);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (b.rank() != 2 || a.rank() < 1 || a.cols() != b.dim(0))
    throw Error(Errc::ShapeMismatch, "matmul " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  const std::size_t m = a.rows(), k = a.cols(), n = b.dim(1);
  Shape out_shape = a.shape();
  out_shape.back() = n;
  Tensor out(out_shape);
  const double* pa = a.data();
  const double* pb = b.data();
  double* po = out.data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = po + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = pa[i * k + p];
      if (av == 0.0) continue;
      const double* brow = pb + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  if (a.rank() != 2) throw Error(Errc::ShapeMismatch, "transpose needs a matrix");
  Tensor out({a.dim(1), a.dim(0)});
  for (std::size_t i = 0; i < a.dim(0); ++i)
    for (std::size_t j = 0; j < a.dim(1); ++j) out(j, i) = a(i, j);
  return out;
}

namespace {
void same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape())
    throw Error(Errc::ShapeMismatch,
                std::string(op) + " " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
}
}  // namespace

Tensor hadamard(const Tensor& a, const Tensor& b) {
  same_shape(a, b, "hadamard");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Tensor operator+(const Tensor& a, const Tensor& b) {
  same_shape(a, b, "add");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Tensor operator-(const Tensor& a, const Tensor& b) {
  same_shape(a, b, "sub");
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Tensor operator*(double s, const Tensor& a) {
  Tensor out(a.shape());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = s * a[i];
  return out;
}

double trace(const Tensor& a) {
  if (a.rank() != 2 || a.dim(0) != a.dim(1)) throw Error(Errc::NonSquare, "trace of " + shape_string(a.shape()));
  double t = 0.0;
  for (std::size_t i = 0; i < a.dim(0); ++i) t += a(i, i);
  return t;
}

double frobenius_norm(const Tensor& a) {
  double s = 0.0;
  for (double v : a.values()) s += v * v;
  return std::sqrt(s);
}

double max_abs(const Tensor& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double norm1(const Tensor& a) {
  if (a.rank() != 2) throw Error(Errc::ShapeMismatch, "norm1 needs a matrix");
  double best = 0.0;
  for (std::size_t j = 0; j < a.dim(1); ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(0); ++i) s += std::abs(a(i, j));
    best = std::max(best, s);
  }
  return best;
}

void require_shape(const Tensor& t, const Shape& expected, const char* what) {
  if (t.shape() != expected)
    throw Error(Errc::ShapeMismatch,
                std::string(what) + ": expected " + shape_string(expected) + ", got " + shape_string(t.shape()));
}

void require_finite(const Tensor& t, const char* what) {
  if (!t.all_finite()) throw Error(Errc::NonFinite, std::string(what) + " has non-finite entries");
}

}  // namespace causalmamba
