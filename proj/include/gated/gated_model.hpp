#pragma once
// Factored gated network: three external layers x, y, h meet through
// equal-size factor layers combined by a parameter-free element-wise product.
//
//   f^x = W^x_in x + b_fx     (likewise f^y, f^h)
//   x^ = s_x(W^x_out (f^y * f^h) + b_x)
//   y^ = s_y(W^y_out (f^x * f^h) + b_y)
//   h^ = s_h(W^h_out (f^x * f^y) + b_h)
//
// In-matrices are stored factor-major (n_f x n_layer). Under tied weights
// W_out = W_in^T and no out-matrix is stored.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "gated/activations.hpp"
#include "gated/numerics.hpp"
#include "gated/rng.hpp"

namespace gated {

/// Values are the on-disk u8 codes.
enum class TyingMode : std::uint8_t { Tied = 0, Untied = 1 };

std::string_view to_string(TyingMode mode);
TyingMode parse_tying(std::string_view name);

enum class Layer { X, Y, H };

struct GatedShape {
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  std::size_t n_h = 0;
  std::size_t n_f = 0;

  std::size_t layer_size(Layer layer) const;
  friend bool operator==(const GatedShape&, const GatedShape&) = default;
};

/// Every trainable array of a gated model. The same structure carries
/// gradients and momentum buffers.
struct GatedParams {
  Matrix w_x_in, w_y_in, w_h_in;
  std::optional<Matrix> w_x_out, w_y_out, w_h_out;
  Vector b_fx, b_fy, b_fh;
  Vector b_x, b_y, b_h;

  static GatedParams zeros(const GatedShape& shape, TyingMode tying);

  /// Visits blocks in the fixed serialization order:
  /// W_x_in, W_y_in, W_h_in, [W_x_out, W_y_out, W_h_out], b_fx, b_fy, b_fh, b_x, b_y, b_h.
  void for_each_block(const std::function<void(std::string_view, std::span<double>)>& fn);
  void for_each_block(
      const std::function<void(std::string_view, std::span<const double>)>& fn) const;

  friend bool operator==(const GatedParams&, const GatedParams&) = default;
};

struct GatedModel {
  GatedShape shape;
  GatedParams params;
  ActivationKind act_x = ActivationKind::Identity;
  ActivationKind act_y = ActivationKind::Identity;
  ActivationKind act_h = ActivationKind::Identity;
  TyingMode tying = TyingMode::Tied;

  /// All weights and biases zero.
  static GatedModel zeros(const GatedShape& shape, TyingMode tying, ActivationKind act_x,
                          ActivationKind act_y, ActivationKind act_h);

  /// Gaussian weights, zero biases. A negative sigma selects the default 0.01/sqrt(n_f).
  static GatedModel random(const GatedShape& shape, TyingMode tying, ActivationKind act_x,
                           ActivationKind act_y, ActivationKind act_h, Rng& rng,
                           double sigma = -1.0);

  const Matrix& in_matrix(Layer layer) const;
  const Vector& factor_bias(Layer layer) const;
  const Vector& output_bias(Layer layer) const;
  ActivationKind activation(Layer layer) const;

  /// W_out * p, using the transpose of the in-matrix when tied.
  Vector apply_out(Layer layer, const Vector& p) const;
  /// W_out^T * d, the backward counterpart of apply_out.
  Vector apply_out_t(Layer layer, const Vector& d) const;

  /// Throws DimensionError if any stored array disagrees with shape/tying.
  void validate() const;

  friend bool operator==(const GatedModel&, const GatedModel&) = default;
};

double default_init_sigma(std::size_t n_f);

/// W_in v + b_f for the named layer. No activation is applied on factors.
Vector project_factor(const GatedModel& model, Layer which, const Vector& v);

Vector predict_y(const GatedModel& model, const Vector& x, const Vector& h);
Vector predict_x(const GatedModel& model, const Vector& y, const Vector& h);
Vector predict_h(const GatedModel& model, const Vector& x, const Vector& y);

/// The explicit 3-way weight array w[i,j,k] with (i,j,k) = (x,y,h).
class DenseTensor {
 public:
  DenseTensor(std::size_t n_x, std::size_t n_y, std::size_t n_h);

  std::size_t n_x() const { return n_x_; }
  std::size_t n_y() const { return n_y_; }
  std::size_t n_h() const { return n_h_; }
  std::size_t size() const { return w_.size(); }

  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return w_[(i * n_y_ + j) * n_h_ + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return w_[(i * n_y_ + j) * n_h_ + k];
  }

 private:
  std::size_t n_x_, n_y_, n_h_;
  std::vector<double> w_;
};

/// w[i,j,k] = sum_f Wx[f,i] Wy[f,j] Wh[f,k]. Requires a tied model with zero
/// factor biases; the dense product has no counterpart for either.
DenseTensor materialize_tensor(const GatedModel& model);

// Triple-sum predictions straight from the tensor.
Vector dense_predict_y(const DenseTensor& t, const Vector& x, const Vector& h, ActivationKind act);
Vector dense_predict_x(const DenseTensor& t, const Vector& y, const Vector& h, ActivationKind act);
Vector dense_predict_h(const DenseTensor& t, const Vector& x, const Vector& y, ActivationKind act);

struct ParamCount {
  std::size_t weights = 0;
  std::size_t biases = 0;
};

/// Tied: n_f (n_x + n_y + n_h) weights; untied doubles it. Biases reported apart.
ParamCount param_count(const GatedModel& model);
ParamCount param_count(const GatedShape& shape, TyingMode tying);
/// n_x n_y n_h.
std::size_t dense_param_count(std::size_t n_x, std::size_t n_y, std::size_t n_h);

/// Exchanges the x and y roles: matrices, biases and activations.
GatedModel swap_xy_roles(const GatedModel& model);

}  // namespace gated
