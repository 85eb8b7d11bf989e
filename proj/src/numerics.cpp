#include "gated/numerics.hpp"

#include <sstream>

#include "gated/kernels.hpp"

namespace gated {
namespace {

std::string vec_shape(const Vector& v) { return "vector(" + std::to_string(v.size()) + ")"; }

void require_same_length(const Vector& a, const Vector& b, const char* op) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(op) + ": length mismatch " + vec_shape(a) + " vs " +
                         vec_shape(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix must have at least one row and column");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (rows == 0 || cols == 0) throw DimensionError("matrix must have at least one row and column");
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                         " does not match " + shape_string());
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  if (rows_ == 0 || cols_ == 0) throw DimensionError("matrix must have at least one row and column");
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionError("ragged matrix initializer");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::string Matrix::shape_string() const {
  std::ostringstream os;
  os << "matrix(" << rows_ << "x" << cols_ << ")";
  return os.str();
}

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) {
    throw DimensionError("matvec: " + m.shape_string() + " cannot multiply " + vec_shape(v));
  }
  Vector out(m.rows());
  kernels::active().matvec(m.data(), m.rows(), m.cols(), v.data(), out.data());
  return out;
}

Vector matvec_t(const Matrix& m, const Vector& v) {
  if (m.rows() != v.size()) {
    throw DimensionError("matvec_t: transpose of " + m.shape_string() + " cannot multiply " +
                         vec_shape(v));
  }
  Vector out(m.cols());
  kernels::active().matvec_t(m.data(), m.rows(), m.cols(), v.data(), out.data());
  return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
  require_same_length(a, b, "hadamard");
  Vector out(a.size());
  kernels::active().hadamard(a.data(), b.data(), out.data(), a.size());
  return out;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) t(c, r) = m(r, c);
  return t;
}

void outer_accumulate(Matrix& m, const Vector& a, const Vector& b) {
  if (m.rows() != a.size() || m.cols() != b.size()) {
    throw DimensionError("outer_accumulate: " + m.shape_string() + " vs " + vec_shape(a) +
                         " x " + vec_shape(b));
  }
  kernels::active().outer_acc(m.data(), m.rows(), m.cols(), a.data(), b.data());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) {
    throw DimensionError("axpy: length mismatch " + std::to_string(x.size()) + " vs " +
                         std::to_string(y.size()));
  }
  kernels::active().axpy(alpha, x.data(), y.data(), x.size());
}

Vector add(const Vector& a, const Vector& b) {
  require_same_length(a, b, "add");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector subtract(const Vector& a, const Vector& b) {
  require_same_length(a, b, "subtract");
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Vector scaled(const Vector& a, double s) {
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
  return out;
}

double dot(const Vector& a, const Vector& b) {
  require_same_length(a, b, "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double squared_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

std::size_t argmax(const Vector& v) {
  if (v.empty()) throw DimensionError("argmax of empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

}  // namespace gated
