#include "gated/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "gated/dataset.hpp"
#include "optim.hpp"

namespace gated {
namespace {

template <class Params>
std::vector<double> flatten(const Params& p) {
  std::vector<double> out;
  p.for_each_block([&](std::string_view, std::span<const double> b) {
    out.insert(out.end(), b.begin(), b.end());
  });
  return out;
}

// Perturbs every scalar of `target` in place and evaluates `loss_fn` at +-eps.
template <class Target, class LossFn>
std::vector<double> numeric_gradient(Target& target, double eps, LossFn&& loss_fn) {
  std::vector<double> out;
  for (std::span<double> block : detail::blocks_of(target)) {
    for (double& w : block) {
      const double saved = w;
      w = saved + eps;
      const double plus = loss_fn();
      w = saved - eps;
      const double minus = loss_fn();
      w = saved;
      out.push_back((plus - minus) / (2.0 * eps));
    }
  }
  return out;
}

Vector random_vector(Rng& rng, std::size_t n, double scale) {
  Vector v(n);
  for (double& x : v) x = scale * rng.gaussian();
  return v;
}

Vector random_unit_interval(Rng& rng, std::size_t n) {
  Vector v(n);
  for (double& x : v) x = 0.05 + 0.9 * rng.uniform();
  return v;
}

GatedModel random_check_model(Rng& rng, TyingMode tying, ActivationKind act) {
  const GatedShape shape{2 + rng.uniform_index(3), 2 + rng.uniform_index(3),
                         2 + rng.uniform_index(3), 2 + rng.uniform_index(3)};
  GatedModel m = GatedModel::random(shape, tying, act, act, act, rng, 0.7);
  m.params.for_each_block([&](std::string_view name, std::span<double> b) {
    if (name.starts_with("b_")) {
      for (double& v : b) v = 0.3 * rng.gaussian();
    }
  });
  return m;
}

}  // namespace

double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  if (analytic.size() != numeric.size()) {
    throw DimensionError("relative_error: " + std::to_string(analytic.size()) + " vs " +
                         std::to_string(numeric.size()) + " entries");
  }
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double d = analytic[i] - numeric[i];
    diff += d * d;
    na += analytic[i] * analytic[i];
    nn += numeric[i] * numeric[i];
  }
  return std::sqrt(diff) / std::max({std::sqrt(na), std::sqrt(nn), 1e-12});
}

GradCheck check_gae_gradient(const GatedModel& model, const Vector& x, const Vector& y,
                             const LossMode& mode, const EncoderInputs& inputs,
                             const Vector* label, double eps) {
  GradCheck out;
  out.analytic = flatten(backward(model, x, y, mode, inputs, label).grads);
  GatedModel probe = model;
  out.numeric = numeric_gradient(probe.params, eps,
                                 [&] { return loss(probe, x, y, mode, inputs, label); });
  out.rel_error = relative_error(out.analytic, out.numeric);
  return out;
}

GradCheck check_clustering_gradient(const ClusteringModel& model, const Vector& x,
                                    const Vector& x_enc, double eps) {
  GradCheck out;
  out.analytic = flatten(clustering_backward(model, x, x_enc).grads);
  ClusteringModel probe = model;
  out.numeric = numeric_gradient(probe, eps, [&] { return clustering_loss(probe, x, x_enc); });
  out.rel_error = relative_error(out.analytic, out.numeric);
  return out;
}

GradCheck check_mrnn_gradient(const MRnnModel& model, const SequencePair& seq, MRnnLoss kind,
                              double eps) {
  GradCheck out;
  out.analytic = flatten(mrnn_gradients(model, seq, kind).grads);
  MRnnModel probe = model;
  out.numeric = numeric_gradient(probe, eps, [&] { return mrnn_loss(probe, seq, kind); });
  out.rel_error = relative_error(out.analytic, out.numeric);
  return out;
}

double GridReport::max_rel_error() const {
  double worst = 0.0;
  for (const auto& e : entries) worst = std::max(worst, e.rel_error);
  return worst;
}

std::size_t GridReport::failures(double tolerance) const {
  return static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(), [&](const GridEntry& e) {
    return !(e.rel_error < tolerance);
  }));
}

GridReport run_gradcheck_grid(std::size_t seeds, std::uint64_t base_seed) {
  const LossMode modes[] = {{LossMode::Kind::ReconstructX, 0.5},
                            {LossMode::Kind::ReconstructY, 0.5},
                            {LossMode::Kind::Symmetric, 0.5},
                            {LossMode::Kind::CrossEntropyX, 0.5},
                            LossMode::hybrid(0.5)};
  const ActivationKind acts[] = {ActivationKind::Identity, ActivationKind::Sigmoid,
                                 ActivationKind::Relu, ActivationKind::Softplus};
  GridReport report;
  for (const LossMode& mode : modes) {
    for (TyingMode tying : {TyingMode::Tied, TyingMode::Untied}) {
      for (ActivationKind act : acts) {
        for (std::size_t s = 0; s < seeds; ++s) {
          Rng rng(base_seed + 1000 * s + 17);
          const GatedModel model = random_check_model(rng, tying, act);
          const Vector x = random_unit_interval(rng, model.shape.n_x);
          const Vector y = random_unit_interval(rng, model.shape.n_y);
          const Vector label = one_hot(model.shape.n_h, rng.uniform_index(model.shape.n_h));
          const GradCheck gc = check_gae_gradient(model, x, y, mode, clean_encoder_inputs(x, y),
                                                  mode.needs_label() ? &label : nullptr);
          report.entries.push_back({"gae/" + to_string(mode) + "/" + std::string(to_string(tying)) +
                                        "/" + std::string(to_string(act)) + "/seed" + std::to_string(s),
                                    gc.rel_error});
        }
      }
    }
  }
  for (std::size_t s = 0; s < seeds; ++s) {
    Rng rng(base_seed + 5000 + s);
    ClusteringModel model = ClusteringModel::random(3, 2, 2 + rng.uniform_index(3),
                                                    2 + rng.uniform_index(3),
                                                    ActivationKind::Identity, rng, 0.7, 0.7);
    for (double& v : model.b_ae) v = 0.3 * rng.gaussian();
    const Vector x = random_vector(rng, 3, 1.0);
    const GradCheck gc = check_clustering_gradient(model, x, x);
    report.entries.push_back({"clustering/seed" + std::to_string(s), gc.rel_error});
  }
  for (std::size_t s = 0; s < seeds; ++s) {
    Rng rng(base_seed + 9000 + s);
    MRnnModel model = MRnnModel::random(2, 2, 2 + rng.uniform_index(2), rng, 0.8);
    model.b_y = random_vector(rng, 2, 0.3);
    model.h0 = random_vector(rng, 2, 0.3);
    SequencePair seq;
    for (int t = 0; t < 3; ++t) {
      seq.inputs.push_back(random_vector(rng, 2, 1.0));
      seq.targets.push_back(random_vector(rng, 2, 1.0));
    }
    report.entries.push_back({"mrnn/squared/seed" + std::to_string(s),
                              check_mrnn_gradient(model, seq, MRnnLoss::Squared).rel_error});
    SequencePair onehot = seq;
    for (std::size_t t = 0; t < onehot.targets.size(); ++t) onehot.targets[t] = one_hot(2, rng.uniform_index(2));
    report.entries.push_back({"mrnn/cross_entropy/seed" + std::to_string(s),
                              check_mrnn_gradient(model, onehot, MRnnLoss::SoftmaxCrossEntropy).rel_error});
  }
  return report;
}

}  // namespace gated
