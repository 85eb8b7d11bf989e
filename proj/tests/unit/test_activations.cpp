#include <cmath>
#include <limits>

#include "doctest.h"
#include "gated/activations.hpp"
#include "gated/rng.hpp"

using namespace gated;

namespace {

const ActivationKind kAll[] = {ActivationKind::Identity, ActivationKind::Sigmoid,
                               ActivationKind::Relu, ActivationKind::Softplus,
                               ActivationKind::Softmax};

}  // namespace

TEST_CASE("activate on fixed inputs") {
  CHECK(activate(ActivationKind::Softplus, Vector{0})[0] == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const Vector s = activate(ActivationKind::Softmax, Vector{0, 0});
  CHECK(s[0] == 0.5);
  CHECK(s[1] == 0.5);
  for (double c : {-50.0, 0.0, 3.5, 700.0}) {
    const Vector t = activate(ActivationKind::Softmax, Vector{c, c + std::log(3.0)});
    CHECK(t[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(t[1] == doctest::Approx(0.75).epsilon(1e-12));
  }
  CHECK(activate(ActivationKind::Relu, Vector{-1, 0, 2}) == Vector{0, 0, 2});
  CHECK(activate(ActivationKind::Identity, Vector{-1, 2}) == Vector{-1, 2});
}

TEST_CASE("activate rejects non-finite input") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  for (ActivationKind k : kAll) {
    CHECK_THROWS_AS(activate(k, Vector{0, nan}), std::domain_error);
    CHECK_THROWS_AS(activate(k, Vector{inf}), std::domain_error);
  }
}

TEST_CASE("extreme inputs stay finite") {
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) == 1.0);
  CHECK(softplus(800.0) == 800.0);
  CHECK(softplus(-800.0) >= 0.0);
  const Vector s = activate(ActivationKind::Softmax, Vector{1000, -1000});
  CHECK(s[0] == 1.0);
}

TEST_CASE("activate_grad on fixed inputs") {
  CHECK(activate_grad(ActivationKind::Sigmoid, Vector{0}, Vector{1})[0] == 0.25);
  CHECK(activate_grad(ActivationKind::Relu, Vector{-1}, Vector{5})[0] == 0.0);
  CHECK(activate_grad(ActivationKind::Relu, Vector{0}, Vector{5})[0] == 0.0);
  CHECK_THROWS_AS(activate_grad(ActivationKind::Sigmoid, Vector{0, 1}, Vector{1}), DimensionError);
}

TEST_CASE("activate_grad matches central differences") {
  Rng rng(5);
  const double eps = 1e-5;
  for (ActivationKind k : kAll) {
    CAPTURE(to_string(k));
    for (int trial = 0; trial < 5; ++trial) {
      Vector z = rng_draw_gaussian(rng, 0.0, 1.0, 4);
      if (k == ActivationKind::Relu) {
        for (double& v : z) v += (v >= 0 ? 0.1 : -0.1);
      }
      const Vector up = rng_draw_gaussian(rng, 0.0, 1.0, 4);
      const Vector g = activate_grad(k, z, up);
      double num2 = 0.0, diff2 = 0.0, ana2 = 0.0;
      for (std::size_t i = 0; i < 4; ++i) {
        Vector zp = z, zm = z;
        zp[i] += eps;
        zm[i] -= eps;
        const Vector ap = activate(k, zp), am = activate(k, zm);
        double n = 0.0;
        for (std::size_t j = 0; j < 4; ++j) n += up[j] * (ap[j] - am[j]) / (2 * eps);
        num2 += n * n;
        ana2 += g[i] * g[i];
        diff2 += (g[i] - n) * (g[i] - n);
      }
      const double denom = std::max({std::sqrt(num2), std::sqrt(ana2), 1e-12});
      CHECK(std::sqrt(diff2) / denom < 1e-6);
    }
  }
}

TEST_CASE("softplus derivative equals sigmoid") {
  Rng rng(8);
  const Vector z = rng_draw_gaussian(rng, 0.0, 4.0, 64);
  const Vector g = activate_grad(ActivationKind::Softplus, z, Vector(64, 1.0));
  for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::fabs(g[i] - sigmoid(z[i])) < 1e-12);
}

TEST_CASE("softmax normalisation and shift invariance") {
  Rng rng(9);
  for (int t = 0; t < 50; ++t) {
    const Vector z = rng_draw_gaussian(rng, 0.0, 5.0, 6);
    const Vector s = activate(ActivationKind::Softmax, z);
    double sum = 0.0;
    for (double v : s) sum += v;
    CHECK(std::fabs(sum - 1.0) < 1e-12);
    Vector shifted = z;
    for (double& v : shifted) v += 17.25;
    const Vector s2 = activate(ActivationKind::Softmax, shifted);
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::fabs(s[i] - s2[i]) < 1e-12);
  }
}

TEST_CASE("names and codes round-trip") {
  for (ActivationKind k : kAll) {
    CHECK(parse_activation(to_string(k)) == k);
    CHECK(activation_from_code(static_cast<std::uint8_t>(k)) == k);
  }
  CHECK_THROWS(parse_activation("tanh"));
  CHECK_THROWS(activation_from_code(9));
}

TEST_CASE("argmax_onehot") {
  CHECK(argmax_onehot(Vector{0.1, 0.7, 0.2}) == Vector{0, 1, 0});
}
