#include "gated/kernels.hpp"

namespace gated::kernels {
namespace {

void matvec(const double* m, std::size_t rows, std::size_t cols, const double* v,
            double* out) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
}

void matvec_t(const double* m, std::size_t rows, std::size_t cols, const double* v,
              double* out) {
  for (std::size_t c = 0; c < cols; ++c) out[c] = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = m + r * cols;
    const double vr = v[r];
    for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * vr;
  }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void outer_acc(double* m, std::size_t rows, std::size_t cols, const double* a,
               const double* b) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = m + r * cols;
    const double ar = a[r];
    for (std::size_t c = 0; c < cols; ++c) row[c] += ar * b[c];
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void momentum_step(double mu, double lr, const double* g, double* v, double* theta,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = mu * v[i] - lr * g[i];
    theta[i] = theta[i] + v[i];
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Backend::Scalar, "scalar", matvec,  matvec_t,
                                 hadamard,        outer_acc, axpy,   momentum_step};
  return table;
}

}  // namespace gated::kernels
