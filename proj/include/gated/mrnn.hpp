#pragma once
// Multiplicative recurrent network. The recurrent transition is gated by the
// current input through a factor layer:
//   f_t = (W_fx x_t) * (W_fh h_{t-1})
//   h_t = tanh(W_hf f_t + W_hx x_t)
//   y_t = W_out h_t + b_y
// Trained supervised with backpropagation through time.

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "gated/dataset.hpp"
#include "gated/numerics.hpp"
#include "gated/rng.hpp"
#include "gated/training.hpp"

namespace gated {

struct MRnnModel {
  std::size_t n_x = 0;
  std::size_t n_h = 0;
  std::size_t n_f = 0;
  Matrix w_fx;   // n_f x n_x
  Matrix w_fh;   // n_f x n_h
  Matrix w_hf;   // n_h x n_f
  Matrix w_hx;   // n_h x n_x
  Matrix w_out;  // n_x x n_h
  Vector b_y;    // n_x
  Vector h0;     // n_h, trainable initial state

  static MRnnModel zeros(std::size_t n_x, std::size_t n_h, std::size_t n_f);
  static MRnnModel random(std::size_t n_x, std::size_t n_h, std::size_t n_f, Rng& rng,
                          double sigma);

  void validate() const;

  /// Order: W_fx, W_fh, W_hf, W_hx, W_out, b_y, h0.
  void for_each_block(const std::function<void(std::string_view, std::span<double>)>& fn);
  void for_each_block(
      const std::function<void(std::string_view, std::span<const double>)>& fn) const;

  friend bool operator==(const MRnnModel&, const MRnnModel&) = default;
};

inline constexpr double kMRnnClipNorm = 5.0;

/// Per-step output loss. Squared: 1/2 |y - target|^2. SoftmaxCrossEntropy treats
/// y as logits: -sum_i target_i log softmax(y)_i.
enum class MRnnLoss : std::uint8_t { Squared = 0, SoftmaxCrossEntropy = 1 };

std::string_view to_string(MRnnLoss loss);
MRnnLoss parse_mrnn_loss(std::string_view name);

struct MRnnStep {
  Vector h;
  Vector y_hat;
};

MRnnStep mrnn_step(const MRnnModel& model, const Vector& x_t, const Vector& h_prev);

/// Runs mrnn_step from h0 over the whole sequence; one output per input.
std::vector<Vector> mrnn_forward(const MRnnModel& model, const std::vector<Vector>& xs);

struct SequencePair {
  std::vector<Vector> inputs;
  std::vector<Vector> targets;
};

/// Sum of the per-step losses.
double mrnn_loss(const MRnnModel& model, const SequencePair& seq,
                 MRnnLoss kind = MRnnLoss::Squared);

struct MRnnGradient {
  MRnnModel grads;  // same shape as the model
  double loss = 0.0;
};

/// Full-sequence BPTT.
MRnnGradient mrnn_gradients(const MRnnModel& model, const SequencePair& seq,
                            MRnnLoss kind = MRnnLoss::Squared);

struct MRnnTrainResult {
  MRnnModel model;
  std::vector<EpochStats> trace;
};

/// Minibatch SGD over sequences with the minibatch gradient clipped to L2
/// norm kMRnnClipNorm. config.loss and config.corruption are ignored.
MRnnTrainResult mrnn_train(MRnnModel model, const std::vector<SequencePair>& sequences,
                           const TrainConfig& config, MRnnLoss kind = MRnnLoss::Squared);

/// Splits the ordered (x_t, y_t) examples of a dataset into consecutive
/// sequences of at most seq_len steps.
std::vector<SequencePair> sequences_from_dataset(const Dataset& data, std::size_t seq_len);

/// Fraction of steps whose argmax output matches the argmax target.
double mrnn_argmax_accuracy(const MRnnModel& model, const SequencePair& seq);

}  // namespace gated
