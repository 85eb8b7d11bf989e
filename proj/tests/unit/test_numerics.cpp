#include <cmath>

#include "doctest.h"
#include "gated/numerics.hpp"
#include "gated/rng.hpp"

using namespace gated;

TEST_CASE("matvec") {
  CHECK(matvec(Matrix::identity(2), Vector{3, 4}) == Vector{3, 4});
  CHECK(matvec(Matrix{{1, 2}, {3, 4}}, Vector{1, 1}) == Vector{3, 7});
}

TEST_CASE("matvec rejects mismatched shapes and names both") {
  const Matrix m(2, 3);
  try {
    matvec(m, Vector(2));
    FAIL("expected DimensionError");
  } catch (const DimensionError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("2x3") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
  }
}

TEST_CASE("matvec_t") {
  CHECK(matvec_t(Matrix::identity(2), Vector{3, 4}) == Vector{3, 4});
  CHECK(matvec_t(Matrix{{1, 2}, {3, 4}}, Vector{1, 1}) == Vector{4, 6});
  CHECK_THROWS_AS(matvec_t(Matrix(2, 3), Vector(3)), DimensionError);
}

TEST_CASE("matvec_t equals matvec of the explicit transpose") {
  Rng rng(11);
  const Matrix m = random_gaussian_matrix(rng, 3, 4, 1.0);
  const Vector v = rng_draw_gaussian(rng, 0.0, 1.0, 3);
  CHECK(matvec_t(m, v) == matvec(transpose(m), v));
}

TEST_CASE("hadamard") {
  CHECK(hadamard(Vector{1, 2}, Vector{3, 4}) == Vector{3, 8});
  const Vector v{0.5, -2, 7};
  CHECK(hadamard(v, Vector(3, 1.0)) == v);
  CHECK(hadamard(v, Vector(3, 0.0)) == Vector(3, 0.0));
  CHECK_THROWS_AS(hadamard(Vector(2), Vector(3)), DimensionError);
}

TEST_CASE("outer_accumulate adds a b^T") {
  Matrix m{{1, 1, 1}, {1, 1, 1}};
  outer_accumulate(m, Vector{1, 2}, Vector{3, 4, 5});
  CHECK(m == Matrix{{4, 5, 6}, {7, 9, 11}});
  CHECK_THROWS_AS(outer_accumulate(m, Vector{1}, Vector{1, 2, 3}), DimensionError);
}

TEST_CASE("matrix construction") {
  CHECK_THROWS_AS(Matrix(0, 3), DimensionError);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>(3)), DimensionError);
  CHECK_THROWS(Matrix{{1, 2}, {3}});
}

TEST_CASE("gaussian draws") {
  SUBCASE("degenerate sigma") {
    Rng rng(1);
    CHECK(rng_draw_gaussian(rng, 1.0, 0.0, 3) == Vector{1, 1, 1});
  }
  SUBCASE("negative sigma is rejected") {
    Rng rng(1);
    CHECK_THROWS(rng_draw_gaussian(rng, 0.0, -1.0, 3));
  }
  SUBCASE("same seed, same draws") {
    Rng a(99), b(99);
    CHECK(rng_draw_gaussian(a, 0.0, 1.0, 50) == rng_draw_gaussian(b, 0.0, 1.0, 50));
  }
  SUBCASE("sample mean of 1e5 standard draws") {
    Rng rng(42);
    const Vector v = rng_draw_gaussian(rng, 0.0, 1.0, 100000);
    double sum = 0.0;
    for (double x : v) sum += x;
    CHECK(std::fabs(sum / 1e5) < 0.02);
  }
}

TEST_CASE("uniform draws stay in [0, 1) and uniform_index in range") {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(rng.uniform_index(7) < 7);
  }
}
