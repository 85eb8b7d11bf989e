#pragma once
// Shared minibatch SGD loop for every trainable model in the library.
// Parameter structures expose for_each_block(fn(name, span)).

#include <chrono>
#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gated/kernels.hpp"
#include "gated/training.hpp"

namespace gated::detail {

using BlockList = std::vector<std::span<double>>;
using ConstBlockList = std::vector<std::span<const double>>;

template <class Params>
BlockList blocks_of(Params& p) {
  BlockList out;
  p.for_each_block([&](std::string_view, std::span<double> s) { out.push_back(s); });
  return out;
}

template <class Params>
ConstBlockList blocks_of(const Params& p) {
  ConstBlockList out;
  p.for_each_block([&](std::string_view, std::span<const double> s) { out.push_back(s); });
  return out;
}

template <class A, class B>
void require_matching(const A& a, const B& b, const char* what) {
  if (a.size() != b.size()) {
    throw DimensionError(std::string(what) + ": " + std::to_string(a.size()) + " blocks vs " +
                         std::to_string(b.size()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) {
      throw DimensionError(std::string(what) + ": block " + std::to_string(i) + " has " +
                           std::to_string(a[i].size()) + " entries vs " + std::to_string(b[i].size()));
    }
  }
}

inline void momentum_update(const BlockList& params, const ConstBlockList& grads,
                            const BlockList& velocity, double lr, double momentum) {
  require_matching(params, grads, "sgd_step gradient shape");
  require_matching(params, velocity, "sgd_step velocity shape");
  const auto& k = kernels::active();
  for (std::size_t i = 0; i < params.size(); ++i) {
    k.momentum_step(momentum, lr, grads[i].data(), velocity[i].data(), params[i].data(),
                    params[i].size());
  }
}

inline void accumulate(const BlockList& into, const ConstBlockList& from, double alpha) {
  require_matching(into, from, "gradient accumulation");
  for (std::size_t i = 0; i < into.size(); ++i) axpy(alpha, from[i], into[i]);
}

inline void fill_zero(const BlockList& blocks) {
  for (auto b : blocks)
    for (double& v : b) v = 0.0;
}

inline double global_norm(const BlockList& blocks) {
  double acc = 0.0;
  for (auto b : blocks) acc += squared_norm(b);
  return std::sqrt(acc);
}

inline void scale(const BlockList& blocks, double s) {
  for (auto b : blocks)
    for (double& v : b) v *= s;
}

inline std::vector<std::size_t> shuffled_order(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);
  return order;
}

/// grad_fn(item, rng) -> {Grads, double loss}. `zero` is a zero-filled Grads
/// whose blocks line up with those of `params`. clip_norm <= 0 disables
/// clipping of the minibatch gradient.
template <class Params, class Grads, class GradFn>
std::vector<EpochStats> run_minibatch_sgd(Params& params, std::size_t n_items,
                                          const TrainConfig& config, const Grads& zero,
                                          GradFn&& grad_fn, double clip_norm = 0.0) {
  config.validate();
  if (n_items == 0) throw std::invalid_argument("training requires a non-empty dataset");
  Rng rng(config.seed);
  Grads velocity = zero;
  Grads batch = zero;
  const BlockList param_blocks = blocks_of(params);
  const BlockList velocity_blocks = blocks_of(velocity);
  const BlockList batch_blocks = blocks_of(batch);

  std::vector<EpochStats> trace;
  trace.reserve(config.epochs);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<std::size_t> order = shuffled_order(n_items, rng);
    double loss_sum = 0.0;
    for (std::size_t begin = 0; begin < n_items; begin += config.batch_size) {
      const std::size_t end = std::min(n_items, begin + config.batch_size);
      fill_zero(batch_blocks);
      for (std::size_t pos = begin; pos < end; ++pos) {
        auto [grad, item_loss] = grad_fn(order[pos], rng);
        if (!std::isfinite(item_loss)) {
          throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                   ", example " + std::to_string(order[pos]) +
                                   "; lower the learning rate or check the data");
        }
        loss_sum += item_loss;
        accumulate(batch_blocks, blocks_of(std::as_const(grad)), 1.0);
      }
      scale(batch_blocks, 1.0 / static_cast<double>(end - begin));
      if (clip_norm > 0.0) {
        const double norm = global_norm(batch_blocks);
        if (norm > clip_norm) scale(batch_blocks, clip_norm / norm);
      }
      momentum_update(param_blocks, blocks_of(std::as_const(batch)), velocity_blocks, config.lr,
                      config.momentum);
    }
    const std::chrono::duration<double, std::milli> elapsed =
        std::chrono::steady_clock::now() - start;
    trace.push_back({epoch, loss_sum / static_cast<double>(n_items), elapsed.count()});
  }
  return trace;
}

}  // namespace gated::detail
