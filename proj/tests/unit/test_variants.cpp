#include <cmath>

#include "doctest.h"
#include "gated/gradcheck.hpp"
#include "gated/variants.hpp"

using namespace gated;

namespace {

constexpr auto Id = ActivationKind::Identity;
constexpr auto Sig = ActivationKind::Sigmoid;
constexpr auto Relu = ActivationKind::Relu;

double rms(const Vector& a, const Vector& b) {
  return std::sqrt(squared_norm(subtract(a, b).span()) / static_cast<double>(a.size()));
}

TrainConfig pilot_config(std::uint64_t seed) {
  TrainConfig c;
  c.loss = {LossMode::Kind::Symmetric};
  c.corruption = {CorruptionKind::Masking, 0.2};
  c.lr = 0.05;
  c.momentum = 0.9;
  c.epochs = 50;
  c.batch_size = 10;
  c.seed = seed;
  return c;
}

std::vector<Vector> two_centers(std::size_t dim) {
  std::vector<Vector> centers;
  for (std::size_t k = 0; k < 2; ++k) {
    Vector c(dim);
    for (std::size_t i = 0; i < dim; ++i) c[i] = (i % 2 == k) ? 1.0 : 0.0;
    centers.push_back(c);
  }
  return centers;
}

}  // namespace

TEST_CASE("analogy of a zero model is zero") {
  const GatedModel m = GatedModel::zeros({3, 3, 2, 4}, TyingMode::Tied, Id, Id, Id);
  CHECK(analogy(m, Vector{1, 2, 3}, Vector{4, 5, 6}, Vector{7, 8, 9}) == Vector(3, 0.0));
  CHECK_THROWS_AS(analogy(m, Vector{1, 2, 3}, Vector{4, 5, 6}, Vector{7, 8}), DimensionError);
}

TEST_CASE("identity-trained model copies the new input") {
  Rng rng(42);
  const Dataset train_set = gen_shift_pairs(rng, 1000, 16, 0, 0.3);
  const Dataset test_set = gen_shift_pairs(rng, 100, 16, 0, 0.3);
  const GatedModel m = GatedModel::random({16, 16, 8, 32}, TyingMode::Tied, Sig, Sig, Sig, rng, 0.05);
  const GatedModel trained = train(m, train_set, pilot_config(42)).model;
  for (std::size_t i = 0; i + 1 < test_set.size(); ++i) {
    const Vector& a = test_set.examples[i].x;
    const Vector& b = test_set.examples[i + 1].x;
    if (squared_norm(b.span()) == 0.0) continue;
    const Vector f = analogy(trained, a, a, b);
    CHECK(std::sqrt(squared_norm(subtract(f, b).span())) < 0.1 * std::sqrt(squared_norm(b.span())));
  }
}

TEST_CASE("shift-trained model transfers the shift to new patterns") {
  Rng rng(42);
  const Dataset train_set = gen_shift_pairs(rng, 1000, 16, 1, 0.3);
  const Dataset test_set = gen_shift_pairs(rng, 100, 16, 1, 0.3);
  const GatedModel m = GatedModel::random({16, 16, 8, 32}, TyingMode::Tied, Sig, Sig, Sig, rng, 0.05);
  const GatedModel trained = train(m, train_set, pilot_config(42)).model;
  for (std::size_t i = 0; i + 1 < test_set.size(); ++i) {
    const Example& src = test_set.examples[i];
    const Vector& x_new = test_set.examples[i + 1].x;
    CHECK(rms(analogy(trained, src.x, src.y, x_new), circular_shift(x_new, 1)) < 0.2);
  }
}

TEST_CASE("class-conditional forward") {
  Rng rng(3);
  GatedModel m = GatedModel::random({4, 3, 5, 6}, TyingMode::Tied, Sig, Sig, Relu, rng, 0.5);
  SUBCASE("a one-hot label selects a column of W_y_in") {
    m.params.b_fy = rng_draw_gaussian(rng, 0, 1, 6);
    const Vector fy = project_factor(m, Layer::Y, one_hot(3, 2));
    for (std::size_t f = 0; f < 6; ++f) CHECK(fy[f] == m.params.w_y_in(f, 2) + m.params.b_fy[f]);
  }
  SUBCASE("non-one-hot labels are rejected") {
    CHECK_THROWS(class_conditional_forward(m, Vector{0.1, 0.2, 0.3, 0.4}, Vector{0.5, 0.5, 0}));
    CHECK_THROWS(class_conditional_forward(m, Vector{0.1, 0.2, 0.3, 0.4}, Vector{1, 0}));
  }
  SUBCASE("requires rectified mapping units") {
    m.act_h = Sig;
    CHECK_THROWS(class_conditional_forward(m, Vector{0.1, 0.2, 0.3, 0.4}, Vector{1, 0, 0}));
  }
}

TEST_CASE("correct class label reconstructs better than the wrong one") {
  Rng rng(42);
  const Dataset blobs = gen_blobs(rng, 200, 8, two_centers(8), 0.1);
  Dataset labelled;
  labelled.n_x = 8;
  labelled.n_y = 2;
  for (const Example& ex : blobs.examples) labelled.examples.push_back({ex.x, *ex.label, std::nullopt});
  const GatedModel m = GatedModel::random({8, 2, 6, 12}, TyingMode::Tied, Id, Id, Relu, rng, 0.3);
  TrainConfig c = pilot_config(42);
  c.loss = {LossMode::Kind::ReconstructX};
  c.corruption = {};
  c.lr = 0.02;
  const GatedModel trained = train(m, labelled, c).model;
  double right = 0.0, wrong = 0.0;
  for (const Example& ex : labelled.examples) {
    const Vector other = one_hot(2, 1 - one_hot_index(ex.y));
    right += squared_norm(subtract(class_conditional_forward(trained, ex.x, ex.y), ex.x).span());
    wrong += squared_norm(subtract(class_conditional_forward(trained, ex.x, other), ex.x).span());
  }
  CHECK(right < wrong);
}

TEST_CASE("clustering model") {
  Rng rng(5);
  ClusteringModel m = ClusteringModel::random(3, 4, 2, 5, Sig, rng);
  SUBCASE("zero autoencoder weights give a uniform class vector") {
    m.w_ae = Matrix(4, 3);
    m.b_ae = Vector(4);
    for (double c : clustering_forward(m, Vector{0.3, 0.9, 0.1}).cls) CHECK(c == 0.25);
  }
  SUBCASE("input size is checked") {
    CHECK_THROWS_AS(clustering_forward(m, Vector{0.3, 0.9}), DimensionError);
  }
  SUBCASE("joint gradient matches finite differences") {
    Rng r(6);
    const ClusteringModel toy = ClusteringModel::random(3, 2, 2, 3, Sig, r, 0.7, 0.7);
    const GradCheck c = check_clustering_gradient(toy, Vector{0.2, 0.8, 0.5}, Vector{0.2, 0.0, 0.5});
    CHECK(c.rel_error < kGradientTolerance);
  }
}

TEST_CASE("clustering training") {
  Rng rng(42);
  const Dataset blobs = gen_blobs(rng, 400, 8, two_centers(8), 0.1);
  const ClusteringModel m = ClusteringModel::random(8, 2, 8, 16, Sig, rng, 0.05);
  TrainConfig c = pilot_config(42);
  c.loss = {LossMode::Kind::ReconstructX};
  c.corruption = {};

  SUBCASE("lr 0 leaves the model unchanged") {
    c.lr = 0.0;
    c.epochs = 2;
    CHECK(clustering_train(m, blobs, c).model == m);
  }
  SUBCASE("separates two blobs") {
    const ClusteringTrainResult r = clustering_train(m, blobs, c);
    CHECK(r.trace.back().mean_loss < r.trace.front().mean_loss);
    std::vector<std::size_t> assign, labels;
    for (const Example& ex : blobs.examples) {
      assign.push_back(argmax(clustering_forward(r.model, ex.x).cls));
      labels.push_back(one_hot_index(*ex.label));
    }
    CHECK(cluster_purity(assign, labels) >= 0.9);
  }
  SUBCASE("other losses are rejected") {
    c.loss = {LossMode::Kind::Symmetric};
    CHECK_THROWS(clustering_train(m, blobs, c));
  }
}

TEST_CASE("cluster purity") {
  CHECK(cluster_purity({0, 0, 1, 1}, {1, 1, 0, 0}) == 1.0);
  CHECK(cluster_purity({0, 0, 0, 0}, {0, 0, 1, 1}) == 0.5);
  CHECK(cluster_purity({0, 0, 0, 1}, {0, 0, 1, 1}) == 0.75);
  CHECK_THROWS(cluster_purity({0}, {0, 1}));
}
