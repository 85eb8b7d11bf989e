#pragma once
// Unsupervised gated-autoencoder training.
//
// One encoder h = s_h(W^h_out (f^x * f^y) + b_h) feeds one or both decoders:
//   x^ = s_x(W^x_out (f^y * f^h) + b_x)      ("reconstruct x given y")
//   y^ = s_y(W^y_out (f^x * f^h) + b_y)      ("reconstruct y given x")
// Corruption touches the encoder path only; losses compare against the
// clean x and y, and the decoders condition on the clean partner input.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gated/dataset.hpp"
#include "gated/gated_model.hpp"
#include "gated/rng.hpp"

namespace gated {

struct LossMode {
  /// Values are the on-disk u8 codes.
  enum class Kind : std::uint8_t {
    ReconstructX = 0,   // 1/2 |x^ - x|^2
    ReconstructY = 1,   // 1/2 |y^ - y|^2
    Symmetric = 2,      // sum of both
    CrossEntropyX = 3,  // Bernoulli cross-entropy on a sigmoid x^
    Hybrid = 4,         // w * Symmetric + (1 - w) * softmax cross-entropy of h against a label
  };

  Kind kind = Kind::Symmetric;
  double hybrid_weight = 0.5;

  static LossMode hybrid(double weight) { return {Kind::Hybrid, weight}; }

  bool needs_x_decoder() const;
  bool needs_y_decoder() const;
  bool needs_label() const { return kind == Kind::Hybrid; }
  void validate() const;

  friend bool operator==(const LossMode&, const LossMode&) = default;
};

std::string to_string(const LossMode& mode);
LossMode::Kind parse_loss_kind(std::string_view name);

enum class CorruptionKind : std::uint8_t { None = 0, Gaussian = 1, Masking = 2, SaltPepper = 3 };
enum class CorruptionTarget : std::uint8_t { InputX = 0, InputY = 1, BothInputs = 2, Factors = 3 };

CorruptionKind parse_corruption_kind(std::string_view name);
CorruptionTarget parse_corruption_target(std::string_view name);

struct CorruptionSpec {
  CorruptionKind kind = CorruptionKind::None;
  /// sigma for Gaussian, probability p for Masking and SaltPepper.
  double level = 0.0;
  CorruptionTarget target = CorruptionTarget::BothInputs;

  void validate() const;
};

struct TrainConfig {
  LossMode loss;
  CorruptionSpec corruption;
  double lr = 0.01;
  double momentum = 0.0;
  std::size_t epochs = 10;
  std::size_t batch_size = 1;
  std::uint64_t seed = 42;

  void validate() const;
};

/// A realized corruption: v -> keep * v + add, elementwise.
struct NoiseDraw {
  Vector keep;
  Vector add;

  Vector apply(const Vector& v) const;
};

NoiseDraw draw_noise(const CorruptionSpec& spec, std::size_t n, Rng& rng);

/// Gaussian adds N(0, sigma^2); Masking zeroes entries with probability p;
/// SaltPepper sets entries with probability p to 0 or 1 with equal odds.
Vector corrupt(const CorruptionSpec& spec, const Vector& v, Rng& rng);

/// What the encoder sees for one example.
struct EncoderInputs {
  Vector x;
  Vector y;
  std::optional<NoiseDraw> fx_noise;
  std::optional<NoiseDraw> fy_noise;
};

EncoderInputs clean_encoder_inputs(const Vector& x, const Vector& y);
EncoderInputs corrupt_encoder_inputs(const CorruptionSpec& spec, const Vector& x,
                                     const Vector& y, std::size_t n_f, Rng& rng);

/// Loss of one example. `label` is required (one-hot of length n_h) for Hybrid.
double loss(const GatedModel& model, const Vector& x, const Vector& y, const LossMode& mode,
            const EncoderInputs& inputs, const Vector* label = nullptr);
double loss(const GatedModel& model, const Vector& x, const Vector& y, const LossMode& mode,
            const Vector* label = nullptr);

struct Reconstruction {
  Vector h;
  std::optional<Vector> x_hat;
  std::optional<Vector> y_hat;
};

/// Encoder output and whichever reconstructions the loss mode uses.
Reconstruction reconstruct(const GatedModel& model, const Vector& x, const Vector& y,
                           const LossMode& mode);

struct GatedGradient {
  GatedParams grads;
  double loss = 0.0;
};

/// dJ/dtheta for every trainable array. Tied matrices receive the sum of their
/// in-role and transposed out-role contributions; out-matrices unused by the
/// active decoders get exact zeros.
GatedGradient backward(const GatedModel& model, const Vector& x, const Vector& y,
                       const LossMode& mode, const EncoderInputs& inputs,
                       const Vector* label = nullptr);

/// Draws corruption from `rng` per config.corruption, then differentiates.
GatedGradient backward(const GatedModel& model, const Vector& x, const Vector& y,
                       const TrainConfig& config, Rng& rng, const Vector* label = nullptr);

/// v <- momentum v - lr g; theta <- theta + v.
void sgd_step(GatedParams& params, const GatedParams& grads, double lr, double momentum,
              GatedParams& velocity);

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double wall_ms = 0.0;
};

struct TrainResult {
  GatedModel model;
  std::vector<EpochStats> trace;
};

/// Minibatch SGD. Each epoch visits the examples in an order shuffled by the
/// config seed; minibatch gradients are the mean over examples accumulated in
/// visiting order. Throws on empty data, mismatched dimensions or a
/// non-finite loss.
TrainResult train(GatedModel model, const Dataset& data, const TrainConfig& config);

/// Mean loss over a dataset without corruption.
double mean_loss(const GatedModel& model, const Dataset& data, const LossMode& mode);

}  // namespace gated
