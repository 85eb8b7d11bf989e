#include <cstring>
#include <vector>

#include "doctest.h"
#include "gated/kernels.hpp"
#include "gated/rng.hpp"

using namespace gated;

namespace {

std::vector<double> draws(Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.gaussian();
  return v;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("avx2 kernels are bitwise identical to scalar kernels") {
  const kernels::KernelTable* simd = kernels::avx2_table();
  if (simd == nullptr) {
    MESSAGE("AVX2 backend unavailable; equivalence not exercised");
    return;
  }
  const kernels::KernelTable& ref = kernels::scalar_table();
  Rng rng(7);
  const std::size_t sizes[] = {1, 2, 3, 4, 5, 7, 8, 9, 13, 16, 17, 31, 33};
  for (std::size_t rows : sizes) {
    for (std::size_t cols : sizes) {
      CAPTURE(rows);
      CAPTURE(cols);
      const auto m = draws(rng, rows * cols);
      const auto v = draws(rng, cols);
      const auto u = draws(rng, rows);

      std::vector<double> a(rows), b(rows);
      ref.matvec(m.data(), rows, cols, v.data(), a.data());
      simd->matvec(m.data(), rows, cols, v.data(), b.data());
      CHECK(same_bits(a, b));

      std::vector<double> at(cols), bt(cols);
      ref.matvec_t(m.data(), rows, cols, u.data(), at.data());
      simd->matvec_t(m.data(), rows, cols, u.data(), bt.data());
      CHECK(same_bits(at, bt));

      auto ma = m, mb = m;
      ref.outer_acc(ma.data(), rows, cols, u.data(), v.data());
      simd->outer_acc(mb.data(), rows, cols, u.data(), v.data());
      CHECK(same_bits(ma, mb));
    }
    const std::size_t n = rows;
    const auto x = draws(rng, n);
    const auto y = draws(rng, n);
    std::vector<double> ha(n), hb(n);
    ref.hadamard(x.data(), y.data(), ha.data(), n);
    simd->hadamard(x.data(), y.data(), hb.data(), n);
    CHECK(same_bits(ha, hb));

    auto ya = y, yb = y;
    ref.axpy(0.37, x.data(), ya.data(), n);
    simd->axpy(0.37, x.data(), yb.data(), n);
    CHECK(same_bits(ya, yb));

    auto va = draws(rng, n);
    auto vb = va;
    auto ta = y, tb = y;
    ref.momentum_step(0.9, 0.05, x.data(), va.data(), ta.data(), n);
    simd->momentum_step(0.9, 0.05, x.data(), vb.data(), tb.data(), n);
    CHECK(same_bits(va, vb));
    CHECK(same_bits(ta, tb));
  }
}

TEST_CASE("scalar matvec accumulates in ascending column order") {
  // 1e16 + 1 - 1e16 depends on order: ascending gives 0, reverse gives 1.
  const std::vector<double> m = {1e16, 1.0, -1e16};
  const std::vector<double> v = {1.0, 1.0, 1.0};
  double out = -1.0;
  kernels::scalar_table().matvec(m.data(), 1, 3, v.data(), &out);
  CHECK(out == 0.0);
}

TEST_CASE("backend selection") {
  kernels::select(kernels::Backend::Scalar);
  CHECK(kernels::active().backend == kernels::Backend::Scalar);
  if (kernels::avx2_table() != nullptr) {
    kernels::select(kernels::Backend::Avx2);
    CHECK(kernels::active().backend == kernels::Backend::Avx2);
  } else {
    CHECK_THROWS(kernels::select(kernels::Backend::Avx2));
  }
}
