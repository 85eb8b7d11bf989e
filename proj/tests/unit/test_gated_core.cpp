#include <cmath>

#include "doctest.h"
#include "gated/gated_model.hpp"
#include "gated/rng.hpp"

using namespace gated;

namespace {

constexpr auto Id = ActivationKind::Identity;

GatedModel identity_model(std::size_t n) {
  GatedModel m = GatedModel::zeros({n, n, n, n}, TyingMode::Tied, Id, Id, Id);
  m.params.w_x_in = Matrix::identity(n);
  m.params.w_y_in = Matrix::identity(n);
  m.params.w_h_in = Matrix::identity(n);
  return m;
}

double max_abs_diff(const Vector& a, const Vector& b) {
  REQUIRE(a.size() == b.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_CASE("project_factor") {
  GatedModel m = identity_model(2);
  CHECK(project_factor(m, Layer::X, Vector{2, 3}) == Vector{2, 3});
  m.params.b_fx = Vector{1, 1};
  CHECK(project_factor(m, Layer::X, Vector{0, 0}) == Vector{1, 1});
  CHECK_THROWS_AS(project_factor(m, Layer::X, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("project_factor matches an explicit double loop") {
  Rng rng(21);
  GatedModel m = GatedModel::random({4, 2, 2, 3}, TyingMode::Tied, Id, Id, Id, rng, 1.0);
  m.params.b_fx = rng_draw_gaussian(rng, 0.0, 1.0, 3);
  const Vector x = rng_draw_gaussian(rng, 0.0, 1.0, 4);
  const Vector f = project_factor(m, Layer::X, x);
  for (std::size_t r = 0; r < 3; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 4; ++c) s += m.params.w_x_in(r, c) * x[c];
    CHECK(f[r] == s + m.params.b_fx[r]);
  }
}

TEST_CASE("predictions of the identity model") {
  const GatedModel m = identity_model(2);
  CHECK(predict_y(m, Vector{2, 3}, Vector{5, 7}) == Vector{10, 21});
  CHECK(predict_x(m, Vector{2, 3}, Vector{5, 7}) == Vector{10, 21});
  CHECK(predict_h(m, Vector{2, 3}, Vector{5, 7}) == Vector{10, 21});
  CHECK(predict_y(m, Vector{0, 0}, Vector{5, 7}) == Vector{0, 0});
  CHECK(predict_x(m, Vector{5, 7}, Vector{0, 0}) == Vector{0, 0});
  CHECK_THROWS_AS(predict_y(m, Vector{1}, Vector{1, 2}), DimensionError);
}

TEST_CASE("softmax mapping units sum to one") {
  Rng rng(4);
  GatedModel m = GatedModel::random({3, 3, 5, 4}, TyingMode::Untied, Id, Id,
                                    ActivationKind::Softmax, rng, 1.0);
  for (int t = 0; t < 10; ++t) {
    const Vector h = predict_h(m, rng_draw_gaussian(rng, 0, 1, 3), rng_draw_gaussian(rng, 0, 1, 3));
    double s = 0.0;
    for (double v : h) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("materialize_tensor") {
  SUBCASE("single factor") {
    GatedModel m = GatedModel::zeros({2, 1, 2, 1}, TyingMode::Tied, Id, Id, Id);
    m.params.w_x_in = Matrix{{1, 2}};
    m.params.w_y_in = Matrix{{3}};
    m.params.w_h_in = Matrix{{1, 1}};
    const DenseTensor t = materialize_tensor(m);
    CHECK(t(0, 0, 0) == 3);
    CHECK(t(0, 0, 1) == 3);
    CHECK(t(1, 0, 0) == 6);
    CHECK(t(1, 0, 1) == 6);
  }
  SUBCASE("zero W^h gives a zero tensor") {
    Rng rng(2);
    GatedModel m = GatedModel::random({3, 2, 4, 3}, TyingMode::Tied, Id, Id, Id, rng, 1.0);
    m.params.w_h_in = Matrix(3, 4);
    const DenseTensor t = materialize_tensor(m);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t k = 0; k < 4; ++k) CHECK(t(i, j, k) == 0.0);
  }
  SUBCASE("nonzero factor bias is rejected") {
    GatedModel m = identity_model(2);
    m.params.b_fy = Vector{0, 1};
    CHECK_THROWS_WITH_AS(materialize_tensor(m), doctest::Contains("bias"), std::invalid_argument);
  }
  SUBCASE("untied models are rejected") {
    Rng rng(2);
    const GatedModel m = GatedModel::random({2, 2, 2, 2}, TyingMode::Untied, Id, Id, Id, rng, 1.0);
    CHECK_THROWS(materialize_tensor(m));
  }
}

TEST_CASE("rank-one factor gives rank-one unfoldings") {
  Rng rng(13);
  const GatedModel m = GatedModel::random({3, 4, 2, 1}, TyingMode::Tied, Id, Id, Id, rng, 1.0);
  const DenseTensor t = materialize_tensor(m);
  // Every 2x2 minor of each unfolding vanishes.
  auto minor_ok = [](double a, double b, double c, double d) {
    return std::fabs(a * d - b * c) <= 1e-12 * (1 + std::fabs(a * d) + std::fabs(b * c));
  };
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t i2 = 0; i2 < 3; ++i2)
      for (std::size_t j = 0; j < 4; ++j)
        for (std::size_t j2 = 0; j2 < 4; ++j2)
          for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t k2 = 0; k2 < 2; ++k2) {
              // mode-x unfolding: rows i, columns (j,k)
              CHECK(minor_ok(t(i, j, k), t(i, j2, k2), t(i2, j, k), t(i2, j2, k2)));
              // mode-y unfolding: rows j, columns (i,k)
              CHECK(minor_ok(t(i, j, k), t(i2, j, k2), t(i, j2, k), t(i2, j2, k2)));
              // mode-h unfolding: rows k, columns (i,j)
              CHECK(minor_ok(t(i, j, k), t(i2, j2, k), t(i, j, k2), t(i2, j2, k2)));
            }
}

TEST_CASE("dense predictions") {
  DenseTensor one(1, 1, 1);
  one(0, 0, 0) = 1.0;
  CHECK(dense_predict_y(one, Vector{2}, Vector{3}, Id) == Vector{6});
  const DenseTensor zero(2, 3, 2);
  CHECK(dense_predict_y(zero, Vector{1, 2}, Vector{3, 4}, Id) == Vector(3, 0.0));
  CHECK_THROWS_AS(dense_predict_y(zero, Vector{1}, Vector{3, 4}, Id), DimensionError);
}

TEST_CASE("factored and dense predictions agree") {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const GatedShape s{1 + rng.uniform_index(5), 1 + rng.uniform_index(5), 1 + rng.uniform_index(5),
                       1 + rng.uniform_index(5)};
    const GatedModel m = GatedModel::random(s, TyingMode::Tied, Id, Id, Id, rng, 1.0);
    const DenseTensor t = materialize_tensor(m);
    const Vector x = rng_draw_gaussian(rng, 0, 1, s.n_x);
    const Vector y = rng_draw_gaussian(rng, 0, 1, s.n_y);
    const Vector h = rng_draw_gaussian(rng, 0, 1, s.n_h);
    CHECK(max_abs_diff(predict_y(m, x, h), dense_predict_y(t, x, h, Id)) < 1e-10);
    CHECK(max_abs_diff(predict_x(m, y, h), dense_predict_x(t, y, h, Id)) < 1e-10);
    CHECK(max_abs_diff(predict_h(m, x, y), dense_predict_h(t, x, y, Id)) < 1e-10);
  }
}

TEST_CASE("parameter counts") {
  const GatedShape s{100, 100, 100, 50};
  CHECK(param_count(s, TyingMode::Tied).weights == 15000);
  CHECK(param_count(s, TyingMode::Untied).weights == 30000);
  CHECK(param_count(s, TyingMode::Tied).biases == 3 * 50 + 300);
  CHECK(dense_param_count(100, 100, 100) == 1000000);
  Rng rng(1);
  const GatedModel m = GatedModel::random({3, 4, 5, 6}, TyingMode::Untied, Id, Id, Id, rng);
  std::size_t stored = 0;
  GatedModel copy = m;
  copy.params.for_each_block([&](std::string_view, std::span<double> b) { stored += b.size(); });
  CHECK(stored == param_count(m).weights + param_count(m).biases);
}

TEST_CASE("x/y role exchange is exact") {
  Rng rng(31);
  for (TyingMode tying : {TyingMode::Tied, TyingMode::Untied}) {
    GatedModel m = GatedModel::random({3, 5, 4, 6}, tying, ActivationKind::Sigmoid,
                                      ActivationKind::Relu, ActivationKind::Softplus, rng, 0.5);
    m.params.b_fx = rng_draw_gaussian(rng, 0, 1, 6);
    m.params.b_fy = rng_draw_gaussian(rng, 0, 1, 6);
    m.params.b_x = rng_draw_gaussian(rng, 0, 1, 3);
    const GatedModel w = swap_xy_roles(m);
    const Vector x = rng_draw_gaussian(rng, 0, 1, 3);
    const Vector y = rng_draw_gaussian(rng, 0, 1, 5);
    const Vector h = rng_draw_gaussian(rng, 0, 1, 4);
    CHECK(predict_h(m, x, y) == predict_h(w, y, x));
    CHECK(predict_y(m, x, h) == predict_x(w, x, h));
    CHECK(predict_x(m, y, h) == predict_y(w, y, h));
  }
}

TEST_CASE("tied out-projection is the transpose of the in-projection") {
  Rng rng(17);
  const GatedModel m = GatedModel::random({3, 3, 3, 4}, TyingMode::Tied, Id, Id, Id, rng, 1.0);
  const Vector p = rng_draw_gaussian(rng, 0, 1, 4);
  CHECK(m.apply_out(Layer::Y, p) == matvec(transpose(m.params.w_y_in), p));
  CHECK_FALSE(m.params.w_y_out.has_value());
}
