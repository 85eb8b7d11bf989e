#include "gated/variants.hpp"

#include <map>
#include <stdexcept>

#include "optim.hpp"

namespace gated {

Vector analogy(const GatedModel& model, const Vector& x_src, const Vector& y_src,
               const Vector& x_new) {
  return predict_y(model, x_new, predict_h(model, x_src, y_src));
}

Vector class_conditional_forward(const GatedModel& model, const Vector& x, const Vector& label) {
  if (model.act_h != ActivationKind::Relu) {
    throw std::invalid_argument("class-conditional model expects a rectified (relu) h layer");
  }
  if (label.size() != model.shape.n_y) {
    throw DimensionError("label has length " + std::to_string(label.size()) + ", model has " +
                         std::to_string(model.shape.n_y) + " classes");
  }
  one_hot_index(label);
  return predict_x(model, label, predict_h(model, x, label));
}

ClusteringModel ClusteringModel::random(std::size_t n_x, std::size_t n_classes, std::size_t n_h,
                                        std::size_t n_f, ActivationKind act_x, Rng& rng,
                                        double sigma, double ae_sigma) {
  GatedModel gated = GatedModel::random({n_x, n_classes, n_h, n_f}, TyingMode::Tied, act_x,
                                        ActivationKind::Softmax, ActivationKind::Softplus, rng,
                                        sigma);
  if (ae_sigma < 0.0) ae_sigma = sigma < 0.0 ? default_init_sigma(n_f) : sigma;
  Matrix w_ae = random_gaussian_matrix(rng, n_classes, n_x, ae_sigma);
  return ClusteringModel{std::move(gated), std::move(w_ae), Vector(n_classes)};
}

void ClusteringModel::for_each_block(
    const std::function<void(std::string_view, std::span<double>)>& fn) {
  gated.params.for_each_block(fn);
  fn("W_AE", w_ae.span());
  fn("b_AE", b_ae.span());
}

void ClusteringModel::validate() const {
  gated.validate();
  if (gated.shape.n_y < 1) throw DimensionError("clustering model needs at least one class");
  if (w_ae.rows() != gated.shape.n_y || w_ae.cols() != gated.shape.n_x) {
    throw DimensionError("W_AE is " + w_ae.shape_string() + ", expected " +
                         std::to_string(gated.shape.n_y) + "x" + std::to_string(gated.shape.n_x));
  }
  if (b_ae.size() != gated.shape.n_y) throw DimensionError("b_AE length does not match class count");
}

ClusteringParams ClusteringParams::zeros(const ClusteringModel& model) {
  return ClusteringParams{GatedParams::zeros(model.gated.shape, model.gated.tying),
                          Matrix(model.w_ae.rows(), model.w_ae.cols()), Vector(model.b_ae.size())};
}

void ClusteringParams::for_each_block(
    const std::function<void(std::string_view, std::span<double>)>& fn) {
  gated.for_each_block(fn);
  fn("W_AE", w_ae.span());
  fn("b_AE", b_ae.span());
}

void ClusteringParams::for_each_block(
    const std::function<void(std::string_view, std::span<const double>)>& fn) const {
  gated.for_each_block(fn);
  fn("W_AE", w_ae.span());
  fn("b_AE", b_ae.span());
}

namespace {

struct ClusterTape {
  Vector z_ae, cls;
  Vector fx, fc, p_h, z_h, h, fh, p_x, z_x, x_hat;
  double loss = 0.0;
};

ClusterTape cluster_forward(const ClusteringModel& model, const Vector& x, const Vector& x_enc) {
  const GatedModel& g = model.gated;
  if (x.size() != g.shape.n_x || x_enc.size() != g.shape.n_x) {
    throw DimensionError("clustering input has length " + std::to_string(x.size()) +
                         ", model expects " + std::to_string(g.shape.n_x));
  }
  ClusterTape t;
  t.z_ae = add(matvec(model.w_ae, x_enc), model.b_ae);
  t.cls = activate(ActivationKind::Softmax, t.z_ae);
  t.fx = project_factor(g, Layer::X, x_enc);
  t.fc = project_factor(g, Layer::Y, t.cls);
  t.p_h = hadamard(t.fx, t.fc);
  t.z_h = add(g.apply_out(Layer::H, t.p_h), g.params.b_h);
  t.h = activate(ActivationKind::Softplus, t.z_h);
  t.fh = project_factor(g, Layer::H, t.h);
  t.p_x = hadamard(t.fc, t.fh);
  t.z_x = add(g.apply_out(Layer::X, t.p_x), g.params.b_x);
  t.x_hat = activate(g.act_x, t.z_x);
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = t.x_hat[i] - x[i];
    acc += d * d;
  }
  t.loss = 0.5 * acc;
  return t;
}

void add_into(Vector& acc, const Vector& v) { axpy(1.0, v.span(), acc.span()); }

void accumulate_out(const GatedModel& m, GatedParams& g, Layer layer, const Vector& dz,
                    const Vector& p) {
  if (m.tying == TyingMode::Tied) {
    Matrix& w = layer == Layer::X ? g.w_x_in : layer == Layer::Y ? g.w_y_in : g.w_h_in;
    outer_accumulate(w, p, dz);
  } else {
    auto& slot = layer == Layer::X ? g.w_x_out : layer == Layer::Y ? g.w_y_out : g.w_h_out;
    outer_accumulate(*slot, dz, p);
  }
}

}  // namespace

ClusteringOutput clustering_forward(const ClusteringModel& model, const Vector& x) {
  ClusterTape t = cluster_forward(model, x, x);
  return ClusteringOutput{std::move(t.cls), std::move(t.h), std::move(t.x_hat)};
}

double clustering_loss(const ClusteringModel& model, const Vector& x, const Vector& x_enc) {
  return cluster_forward(model, x, x_enc).loss;
}

ClusteringGradient clustering_backward(const ClusteringModel& model, const Vector& x,
                                       const Vector& x_enc) {
  const GatedModel& m = model.gated;
  const ClusterTape t = cluster_forward(model, x, x_enc);
  ClusteringGradient out{ClusteringParams::zeros(model), t.loss};
  GatedParams& g = out.grads.gated;

  // decoder: x^ = s_x(W^x_out (f^c * f^h) + b_x)
  const Vector dz_x = activate_grad(m.act_x, t.z_x, subtract(t.x_hat, x));
  accumulate_out(m, g, Layer::X, dz_x, t.p_x);
  add_into(g.b_x, dz_x);
  const Vector d_px = m.apply_out_t(Layer::X, dz_x);
  Vector d_fc = hadamard(d_px, t.fh);
  const Vector d_fh = hadamard(d_px, t.fc);

  outer_accumulate(g.w_h_in, d_fh, t.h);
  add_into(g.b_fh, d_fh);
  const Vector dz_h = activate_grad(ActivationKind::Softplus, t.z_h, matvec_t(m.params.w_h_in, d_fh));
  accumulate_out(m, g, Layer::H, dz_h, t.p_h);
  add_into(g.b_h, dz_h);
  const Vector d_ph = m.apply_out_t(Layer::H, dz_h);
  const Vector d_fx = hadamard(d_ph, t.fc);
  add_into(d_fc, hadamard(d_ph, t.fx));

  outer_accumulate(g.w_x_in, d_fx, x_enc);
  add_into(g.b_fx, d_fx);
  outer_accumulate(g.w_y_in, d_fc, t.cls);
  add_into(g.b_fy, d_fc);

  // class path: c = softmax(W_AE x + b_AE)
  const Vector d_cls = matvec_t(m.params.w_y_in, d_fc);
  const Vector dz_ae = activate_grad(ActivationKind::Softmax, t.z_ae, d_cls);
  outer_accumulate(out.grads.w_ae, dz_ae, x_enc);
  add_into(out.grads.b_ae, dz_ae);
  return out;
}

ClusteringTrainResult clustering_train(ClusteringModel model, const Dataset& data,
                                       const TrainConfig& config) {
  model.validate();
  if (data.empty()) throw std::invalid_argument("training requires a non-empty dataset");
  if (data.n_x != model.gated.shape.n_x) {
    throw DimensionError("dataset n_x " + std::to_string(data.n_x) + " does not match model n_x " +
                         std::to_string(model.gated.shape.n_x));
  }
  if (config.loss.kind != LossMode::Kind::ReconstructX) {
    throw std::invalid_argument("clustering training uses the reconstruct_x loss");
  }
  const ClusteringParams zero = ClusteringParams::zeros(model);
  auto trace = detail::run_minibatch_sgd(
      model, data.size(), config, zero, [&](std::size_t i, Rng& rng) {
        const Vector& x = data.examples[i].x;
        const Vector x_enc = corrupt(config.corruption, x, rng);
        ClusteringGradient cg = clustering_backward(model, x, x_enc);
        return std::make_pair(std::move(cg.grads), cg.loss);
      });
  return ClusteringTrainResult{std::move(model), std::move(trace)};
}

double cluster_purity(const std::vector<std::size_t>& assignments,
                      const std::vector<std::size_t>& labels) {
  if (assignments.size() != labels.size() || assignments.empty()) {
    throw std::invalid_argument("cluster_purity: assignments and labels must be non-empty and aligned");
  }
  std::map<std::size_t, std::map<std::size_t, std::size_t>> counts;
  for (std::size_t i = 0; i < labels.size(); ++i) ++counts[assignments[i]][labels[i]];
  std::size_t majority_total = 0;
  for (const auto& [cluster, by_label] : counts) {
    std::size_t best = 0;
    for (const auto& [label, n] : by_label) best = std::max(best, n);
    majority_total += best;
  }
  return static_cast<double>(majority_total) / static_cast<double>(labels.size());
}

}  // namespace gated
