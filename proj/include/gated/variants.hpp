#pragma once
// Architectures built around the gated core: analogy making, the
// class-conditional autoencoder, and the softmax-clustering autoencoder.

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "gated/dataset.hpp"
#include "gated/gated_model.hpp"
#include "gated/training.hpp"

namespace gated {

/// Infers h from (x_src, y_src) and applies it to x_new.
Vector analogy(const GatedModel& model, const Vector& x_src, const Vector& y_src,
               const Vector& x_new);

/// x^ = p(label, o(x, label)) with a one-hot class label in the y slot.
/// Requires act_h == Relu and a one-hot label.
Vector class_conditional_forward(const GatedModel& model, const Vector& x, const Vector& label);

/// Gated autoencoder whose y layer is a softmax class vector produced by an
/// extra autoencoding projection of x:
///   c  = softmax(W_AE x + b_AE)
///   h  = softplus(W^h_out (f^x * f^c) + b_h)
///   x^ = s_x(W^x_out (f^c * f^h) + b_x)
/// The gated block's n_y is the number of classes.
struct ClusteringModel {
  GatedModel gated;
  Matrix w_ae;  // n_classes x n_x
  Vector b_ae;

  static ClusteringModel random(std::size_t n_x, std::size_t n_classes, std::size_t n_h,
                                std::size_t n_f, ActivationKind act_x, Rng& rng,
                                double sigma = -1.0, double ae_sigma = -1.0);

  std::size_t n_classes() const { return gated.shape.n_y; }
  void validate() const;
  /// Trainable arrays in ClusteringParams order.
  void for_each_block(const std::function<void(std::string_view, std::span<double>)>& fn);

  friend bool operator==(const ClusteringModel&, const ClusteringModel&) = default;
};

/// Parameter blocks of a clustering model (gated block, then W_AE, b_AE).
struct ClusteringParams {
  GatedParams gated;
  Matrix w_ae;
  Vector b_ae;

  static ClusteringParams zeros(const ClusteringModel& model);
  void for_each_block(const std::function<void(std::string_view, std::span<double>)>& fn);
  void for_each_block(
      const std::function<void(std::string_view, std::span<const double>)>& fn) const;
};

struct ClusteringOutput {
  Vector cls;
  Vector h;
  Vector x_hat;
};

ClusteringOutput clustering_forward(const ClusteringModel& model, const Vector& x);

/// 1/2 |x^ - x|^2 with the encoder fed `x_enc` (the possibly corrupted x).
double clustering_loss(const ClusteringModel& model, const Vector& x, const Vector& x_enc);

struct ClusteringGradient {
  ClusteringParams grads;
  double loss = 0.0;
};

/// Joint gradient through the gated path and the W_AE softmax path.
ClusteringGradient clustering_backward(const ClusteringModel& model, const Vector& x,
                                       const Vector& x_enc);

struct ClusteringTrainResult {
  ClusteringModel model;
  std::vector<EpochStats> trace;
};

/// Reconstruct-x training of all weights at once. Corruption, when
/// configured, is applied to the encoder's view of x.
ClusteringTrainResult clustering_train(ClusteringModel model, const Dataset& data,
                                       const TrainConfig& config);

/// Fraction of items whose cluster's majority true label equals their own.
double cluster_purity(const std::vector<std::size_t>& assignments,
                      const std::vector<std::size_t>& labels);

}  // namespace gated
