// AVX2 kernels. This translation unit is the only one built with -mavx2 and
// is reached only through the dispatch table after a CPU check.

#include <immintrin.h>

#include "gated/kernels.hpp"

namespace gated::kernels {
namespace {

constexpr std::size_t kLanes = 4;

// Four rows at a time; each lane owns one row and accumulates its columns
// in ascending order, matching the scalar loop exactly.
void matvec(const double* m, std::size_t rows, std::size_t cols, const double* v,
            double* out) {
  std::size_t r = 0;
  for (; r + kLanes <= rows; r += kLanes) {
    const double* p0 = m + (r + 0) * cols;
    const double* p1 = m + (r + 1) * cols;
    const double* p2 = m + (r + 2) * cols;
    const double* p3 = m + (r + 3) * cols;
    __m256d acc = _mm256_setzero_pd();
    std::size_t c = 0;
    for (; c + kLanes <= cols; c += kLanes) {
      const __m256d r0 = _mm256_loadu_pd(p0 + c);
      const __m256d r1 = _mm256_loadu_pd(p1 + c);
      const __m256d r2 = _mm256_loadu_pd(p2 + c);
      const __m256d r3 = _mm256_loadu_pd(p3 + c);
      const __m256d lo01 = _mm256_unpacklo_pd(r0, r1);
      const __m256d hi01 = _mm256_unpackhi_pd(r0, r1);
      const __m256d lo23 = _mm256_unpacklo_pd(r2, r3);
      const __m256d hi23 = _mm256_unpackhi_pd(r2, r3);
      const __m256d col0 = _mm256_permute2f128_pd(lo01, lo23, 0x20);
      const __m256d col1 = _mm256_permute2f128_pd(hi01, hi23, 0x20);
      const __m256d col2 = _mm256_permute2f128_pd(lo01, lo23, 0x31);
      const __m256d col3 = _mm256_permute2f128_pd(hi01, hi23, 0x31);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(col0, _mm256_set1_pd(v[c + 0])));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(col1, _mm256_set1_pd(v[c + 1])));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(col2, _mm256_set1_pd(v[c + 2])));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(col3, _mm256_set1_pd(v[c + 3])));
    }
    for (; c < cols; ++c) {
      const __m256d col = _mm256_set_pd(p3[c], p2[c], p1[c], p0[c]);
      acc = _mm256_add_pd(acc, _mm256_mul_pd(col, _mm256_set1_pd(v[c])));
    }
    _mm256_storeu_pd(out + r, acc);
  }
  for (; r < rows; ++r) {
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
    const __m256d vr = _mm256_set1_pd(v[r]);
    std::size_t c = 0;
    for (; c + kLanes <= cols; c += kLanes) {
      const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(row + c), vr);
      _mm256_storeu_pd(out + c, _mm256_add_pd(_mm256_loadu_pd(out + c), prod));
    }
    for (; c < cols; ++c) out[c] += row[c] * v[r];
  }
}

void hadamard(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void outer_acc(double* m, std::size_t rows, std::size_t cols, const double* a,
               const double* b) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = m + r * cols;
    const __m256d ar = _mm256_set1_pd(a[r]);
    std::size_t c = 0;
    for (; c + kLanes <= cols; c += kLanes) {
      const __m256d prod = _mm256_mul_pd(ar, _mm256_loadu_pd(b + c));
      _mm256_storeu_pd(row + c, _mm256_add_pd(_mm256_loadu_pd(row + c), prod));
    }
    for (; c < cols; ++c) row[c] += a[r] * b[c];
  }
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d prod = _mm256_mul_pd(va, _mm256_loadu_pd(x + i));
    _mm256_storeu_pd(y + i, _mm256_add_pd(_mm256_loadu_pd(y + i), prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void momentum_step(double mu, double lr, const double* g, double* v, double* theta,
                   std::size_t n) {
  const __m256d vmu = _mm256_set1_pd(mu);
  const __m256d vlr = _mm256_set1_pd(lr);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vel = _mm256_sub_pd(_mm256_mul_pd(vmu, _mm256_loadu_pd(v + i)),
                                      _mm256_mul_pd(vlr, _mm256_loadu_pd(g + i)));
    _mm256_storeu_pd(v + i, vel);
    _mm256_storeu_pd(theta + i, _mm256_add_pd(_mm256_loadu_pd(theta + i), vel));
  }
  for (; i < n; ++i) {
    v[i] = mu * v[i] - lr * g[i];
    theta[i] = theta[i] + v[i];
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Backend::Avx2, "avx2", matvec,  matvec_t,
                                 hadamard,      outer_acc, axpy, momentum_step};
  return table;
}

}  // namespace gated::kernels
