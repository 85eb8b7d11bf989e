#pragma once
// Inner-loop kernels behind the dense numerics.
//
// Every backend must produce results bitwise identical to the scalar
// reference: each output element is accumulated in ascending index order
// with separate multiply and add (no FMA contraction). The SIMD variants
// vectorize across independent output elements only.

#include <cstddef>
#include <string_view>

namespace gated::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  Backend backend;
  std::string_view name;

  // out[r] = sum_c m[r*cols + c] * v[c]
  void (*matvec)(const double* m, std::size_t rows, std::size_t cols,
                 const double* v, double* out);
  // out[c] = sum_r m[r*cols + c] * v[r]
  void (*matvec_t)(const double* m, std::size_t rows, std::size_t cols,
                   const double* v, double* out);
  // out[i] = a[i] * b[i]
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
  // m[r*cols + c] += a[r] * b[c]
  void (*outer_acc)(double* m, std::size_t rows, std::size_t cols,
                    const double* a, const double* b);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // v[i] = mu * v[i] - lr * g[i]; theta[i] = theta[i] + v[i]
  void (*momentum_step)(double mu, double lr, const double* g, double* v,
                        double* theta, std::size_t n);
};

const KernelTable& scalar_table();

/// Returns nullptr when the backend was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

/// The table used by the numerics layer. Chosen once on first use: the best
/// available backend, unless the environment variable GATED_KERNELS=scalar
/// forces the reference path.
const KernelTable& active();

/// Overrides the runtime choice; throws if the backend is unavailable.
void select(Backend backend);

}  // namespace gated::kernels
