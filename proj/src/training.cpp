#include "gated/training.hpp"

#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "optim.hpp"

namespace gated {

bool LossMode::needs_x_decoder() const { return kind != Kind::ReconstructY; }

bool LossMode::needs_y_decoder() const {
  return kind == Kind::ReconstructY || kind == Kind::Symmetric || kind == Kind::Hybrid;
}

void LossMode::validate() const {
  if (kind == Kind::Hybrid && !(hybrid_weight >= 0.0 && hybrid_weight <= 1.0)) {
    throw std::invalid_argument("hybrid weight must lie in [0,1]");
  }
}

std::string to_string(const LossMode& mode) {
  switch (mode.kind) {
    case LossMode::Kind::ReconstructX: return "reconstruct_x";
    case LossMode::Kind::ReconstructY: return "reconstruct_y";
    case LossMode::Kind::Symmetric: return "symmetric";
    case LossMode::Kind::CrossEntropyX: return "cross_entropy_x";
    case LossMode::Kind::Hybrid: return "hybrid(" + std::to_string(mode.hybrid_weight) + ")";
  }
  return "?";
}

LossMode::Kind parse_loss_kind(std::string_view name) {
  if (name == "reconstruct_x") return LossMode::Kind::ReconstructX;
  if (name == "reconstruct_y") return LossMode::Kind::ReconstructY;
  if (name == "symmetric") return LossMode::Kind::Symmetric;
  if (name == "cross_entropy_x") return LossMode::Kind::CrossEntropyX;
  if (name == "hybrid") return LossMode::Kind::Hybrid;
  throw std::invalid_argument("unknown loss '" + std::string(name) + "'");
}

CorruptionKind parse_corruption_kind(std::string_view name) {
  if (name == "none") return CorruptionKind::None;
  if (name == "gaussian") return CorruptionKind::Gaussian;
  if (name == "masking") return CorruptionKind::Masking;
  if (name == "salt_pepper") return CorruptionKind::SaltPepper;
  throw std::invalid_argument("unknown corruption '" + std::string(name) + "'");
}

CorruptionTarget parse_corruption_target(std::string_view name) {
  if (name == "input_x") return CorruptionTarget::InputX;
  if (name == "input_y") return CorruptionTarget::InputY;
  if (name == "both") return CorruptionTarget::BothInputs;
  if (name == "factors") return CorruptionTarget::Factors;
  throw std::invalid_argument("unknown corruption target '" + std::string(name) + "'");
}

void CorruptionSpec::validate() const {
  switch (kind) {
    case CorruptionKind::None:
      return;
    case CorruptionKind::Gaussian:
      if (!(level >= 0.0)) throw std::invalid_argument("gaussian corruption sigma must be >= 0");
      return;
    case CorruptionKind::Masking:
    case CorruptionKind::SaltPepper:
      if (!(level >= 0.0 && level <= 1.0)) {
        throw std::invalid_argument("corruption probability must lie in [0,1]");
      }
      return;
  }
}

void TrainConfig::validate() const {
  loss.validate();
  corruption.validate();
  if (!(lr >= 0.0)) throw std::invalid_argument("learning rate must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw std::invalid_argument("momentum must lie in [0,1)");
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
}

Vector NoiseDraw::apply(const Vector& v) const {
  if (v.size() != keep.size()) {
    throw DimensionError("noise draw of length " + std::to_string(keep.size()) +
                         " applied to vector of length " + std::to_string(v.size()));
  }
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = keep[i] * v[i] + add[i];
  return out;
}

NoiseDraw draw_noise(const CorruptionSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  NoiseDraw d{Vector(n, 1.0), Vector(n, 0.0)};
  switch (spec.kind) {
    case CorruptionKind::None:
      break;
    case CorruptionKind::Gaussian:
      for (std::size_t i = 0; i < n; ++i) d.add[i] = spec.level * rng.gaussian();
      break;
    case CorruptionKind::Masking:
      for (std::size_t i = 0; i < n; ++i)
        if (rng.bernoulli(spec.level)) d.keep[i] = 0.0;
      break;
    case CorruptionKind::SaltPepper:
      for (std::size_t i = 0; i < n; ++i) {
        if (rng.bernoulli(spec.level)) {
          d.keep[i] = 0.0;
          d.add[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
        }
      }
      break;
  }
  return d;
}

Vector corrupt(const CorruptionSpec& spec, const Vector& v, Rng& rng) {
  if (spec.kind == CorruptionKind::SaltPepper) {
    static std::atomic<bool> warned{false};
    for (double value : v) {
      if ((value < 0.0 || value > 1.0) && !warned.exchange(true)) {
        std::cerr << "warning: salt-and-pepper noise assumes data in [0,1]; got " << value << "\n";
        break;
      }
    }
  }
  return draw_noise(spec, v.size(), rng).apply(v);
}

EncoderInputs clean_encoder_inputs(const Vector& x, const Vector& y) {
  return EncoderInputs{x, y, std::nullopt, std::nullopt};
}

EncoderInputs corrupt_encoder_inputs(const CorruptionSpec& spec, const Vector& x, const Vector& y,
                                     std::size_t n_f, Rng& rng) {
  EncoderInputs in = clean_encoder_inputs(x, y);
  if (spec.kind == CorruptionKind::None) return in;
  switch (spec.target) {
    case CorruptionTarget::InputX:
      in.x = corrupt(spec, x, rng);
      break;
    case CorruptionTarget::InputY:
      in.y = corrupt(spec, y, rng);
      break;
    case CorruptionTarget::BothInputs:
      in.x = corrupt(spec, x, rng);
      in.y = corrupt(spec, y, rng);
      break;
    case CorruptionTarget::Factors:
      in.fx_noise = draw_noise(spec, n_f, rng);
      in.fy_noise = draw_noise(spec, n_f, rng);
      break;
  }
  return in;
}

namespace {

void require_len(const char* what, const Vector& v, std::size_t want) {
  if (v.size() != want) {
    throw DimensionError(std::string(what) + " has length " + std::to_string(v.size()) +
                         ", model expects " + std::to_string(want));
  }
}

// Intermediate values of one forward pass, kept for the backward pass.
struct Tape {
  // encoder
  Vector fx_e, fy_e;  // after optional factor noise
  Vector p_h, z_h, h, fh;
  // x decoder
  std::optional<Vector> fy_d, p_x, z_x, x_hat;
  // y decoder
  std::optional<Vector> fx_d, p_y, z_y, y_hat;
  double loss = 0.0;
};

void check_inputs(const GatedModel& model, const Vector& x, const Vector& y,
                  const LossMode& mode, const EncoderInputs& in, const Vector* label) {
  mode.validate();
  require_len("x", x, model.shape.n_x);
  require_len("y", y, model.shape.n_y);
  require_len("encoder x", in.x, model.shape.n_x);
  require_len("encoder y", in.y, model.shape.n_y);
  if (mode.kind == LossMode::Kind::CrossEntropyX) {
    for (double v : x) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw std::invalid_argument("cross-entropy targets must lie in [0,1], got " + std::to_string(v));
      }
    }
  }
  if (mode.needs_label()) {
    if (label == nullptr) throw std::invalid_argument("hybrid loss requires a label");
    require_len("label", *label, model.shape.n_h);
  }
}

double squared_error(const Vector& got, const Vector& want) {
  double acc = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    const double d = got[i] - want[i];
    acc += d * d;
  }
  return 0.5 * acc;
}

// sum_i softplus(z_i) - t_i z_i, the Bernoulli cross-entropy of sigmoid(z) against t.
double logistic_cross_entropy(const Vector& z, const Vector& t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) acc += softplus(z[i]) - t[i] * z[i];
  return acc;
}

// -sum_k t_k log softmax(z)_k
double softmax_cross_entropy(const Vector& z, const Vector& t) {
  const double lse = log_sum_exp(z);
  double acc = 0.0;
  for (std::size_t k = 0; k < z.size(); ++k) acc += t[k] * (lse - z[k]);
  return acc;
}

Tape forward(const GatedModel& model, const Vector& x, const Vector& y, const LossMode& mode,
             const EncoderInputs& in, const Vector* label) {
  check_inputs(model, x, y, mode, in, label);
  Tape t;
  t.fx_e = project_factor(model, Layer::X, in.x);
  t.fy_e = project_factor(model, Layer::Y, in.y);
  if (in.fx_noise) t.fx_e = in.fx_noise->apply(t.fx_e);
  if (in.fy_noise) t.fy_e = in.fy_noise->apply(t.fy_e);
  t.p_h = hadamard(t.fx_e, t.fy_e);
  t.z_h = add(model.apply_out(Layer::H, t.p_h), model.params.b_h);
  t.h = activate(model.act_h, t.z_h);
  t.fh = project_factor(model, Layer::H, t.h);

  const bool cross_entropy = mode.kind == LossMode::Kind::CrossEntropyX;
  const double recon_weight = mode.kind == LossMode::Kind::Hybrid ? mode.hybrid_weight : 1.0;
  double recon = 0.0;
  if (mode.needs_x_decoder()) {
    t.fy_d = project_factor(model, Layer::Y, y);
    t.p_x = hadamard(*t.fy_d, t.fh);
    t.z_x = add(model.apply_out(Layer::X, *t.p_x), model.params.b_x);
    if (cross_entropy) {
      t.x_hat = activate(ActivationKind::Sigmoid, *t.z_x);
      recon += logistic_cross_entropy(*t.z_x, x);
    } else {
      t.x_hat = activate(model.act_x, *t.z_x);
      recon += squared_error(*t.x_hat, x);
    }
  }
  if (mode.needs_y_decoder()) {
    t.fx_d = project_factor(model, Layer::X, x);
    t.p_y = hadamard(*t.fx_d, t.fh);
    t.z_y = add(model.apply_out(Layer::Y, *t.p_y), model.params.b_y);
    t.y_hat = activate(model.act_y, *t.z_y);
    recon += squared_error(*t.y_hat, y);
  }
  t.loss = recon_weight * recon;
  if (mode.needs_label()) {
    t.loss += (1.0 - mode.hybrid_weight) * softmax_cross_entropy(t.z_h, *label);
  }
  return t;
}

// Gradient of an out-projection W_out p (+ b): accumulate dz p^T into the
// stored matrix, which for tied weights is W_in with the transposed layout.
void accumulate_out_grad(const GatedModel& model, GatedParams& g, Layer layer, const Vector& dz,
                         const Vector& p) {
  if (model.tying == TyingMode::Tied) {
    Matrix& w = layer == Layer::X ? g.w_x_in : layer == Layer::Y ? g.w_y_in : g.w_h_in;
    outer_accumulate(w, p, dz);
  } else {
    auto& slot = layer == Layer::X ? g.w_x_out : layer == Layer::Y ? g.w_y_out : g.w_h_out;
    outer_accumulate(*slot, dz, p);
  }
}

void add_into(Vector& acc, const Vector& v) { axpy(1.0, v.span(), acc.span()); }

}  // namespace

double loss(const GatedModel& model, const Vector& x, const Vector& y, const LossMode& mode,
            const EncoderInputs& inputs, const Vector* label) {
  return forward(model, x, y, mode, inputs, label).loss;
}

double loss(const GatedModel& model, const Vector& x, const Vector& y, const LossMode& mode,
            const Vector* label) {
  return loss(model, x, y, mode, clean_encoder_inputs(x, y), label);
}

Reconstruction reconstruct(const GatedModel& model, const Vector& x, const Vector& y,
                           const LossMode& mode) {
  LossMode m = mode;
  // Reconstruction does not need the supervised term.
  if (m.kind == LossMode::Kind::Hybrid) m = {LossMode::Kind::Symmetric, 0.5};
  Tape t = forward(model, x, y, m, clean_encoder_inputs(x, y), nullptr);
  return Reconstruction{std::move(t.h), std::move(t.x_hat), std::move(t.y_hat)};
}

GatedGradient backward(const GatedModel& model, const Vector& x, const Vector& y,
                       const LossMode& mode, const EncoderInputs& inputs, const Vector* label) {
  const Tape t = forward(model, x, y, mode, inputs, label);
  GatedGradient out{GatedParams::zeros(model.shape, model.tying), t.loss};
  GatedParams& g = out.grads;
  const double recon_weight = mode.kind == LossMode::Kind::Hybrid ? mode.hybrid_weight : 1.0;

  Vector d_fh(model.shape.n_f);
  std::optional<Vector> d_fy_d, d_fx_d;

  if (t.x_hat) {
    Vector dz_x(model.shape.n_x);
    if (mode.kind == LossMode::Kind::CrossEntropyX) {
      for (std::size_t i = 0; i < dz_x.size(); ++i) dz_x[i] = (*t.x_hat)[i] - x[i];
    } else {
      Vector residual = scaled(subtract(*t.x_hat, x), recon_weight);
      dz_x = activate_grad(model.act_x, *t.z_x, residual);
    }
    accumulate_out_grad(model, g, Layer::X, dz_x, *t.p_x);
    add_into(g.b_x, dz_x);
    const Vector d_p = model.apply_out_t(Layer::X, dz_x);
    d_fy_d = hadamard(d_p, t.fh);
    add_into(d_fh, hadamard(d_p, *t.fy_d));
  }
  if (t.y_hat) {
    const Vector residual = scaled(subtract(*t.y_hat, y), recon_weight);
    const Vector dz_y = activate_grad(model.act_y, *t.z_y, residual);
    accumulate_out_grad(model, g, Layer::Y, dz_y, *t.p_y);
    add_into(g.b_y, dz_y);
    const Vector d_p = model.apply_out_t(Layer::Y, dz_y);
    d_fx_d = hadamard(d_p, t.fh);
    add_into(d_fh, hadamard(d_p, *t.fx_d));
  }

  // f^h = W^h_in h + b_fh
  outer_accumulate(g.w_h_in, d_fh, t.h);
  add_into(g.b_fh, d_fh);
  const Vector d_h = matvec_t(model.params.w_h_in, d_fh);

  Vector dz_h = activate_grad(model.act_h, t.z_h, d_h);
  if (mode.needs_label()) {
    const Vector s = activate(ActivationKind::Softmax, t.z_h);
    const double w = 1.0 - mode.hybrid_weight;
    double label_mass = 0.0;
    for (double v : *label) label_mass += v;
    for (std::size_t k = 0; k < dz_h.size(); ++k) dz_h[k] += w * (label_mass * s[k] - (*label)[k]);
  }
  accumulate_out_grad(model, g, Layer::H, dz_h, t.p_h);
  add_into(g.b_h, dz_h);
  const Vector d_ph = model.apply_out_t(Layer::H, dz_h);
  Vector d_fx_e = hadamard(d_ph, t.fy_e);
  Vector d_fy_e = hadamard(d_ph, t.fx_e);
  if (inputs.fx_noise) d_fx_e = hadamard(d_fx_e, inputs.fx_noise->keep);
  if (inputs.fy_noise) d_fy_e = hadamard(d_fy_e, inputs.fy_noise->keep);

  // Encoder factors see the corrupted inputs; decoder factors see clean ones.
  outer_accumulate(g.w_x_in, d_fx_e, inputs.x);
  add_into(g.b_fx, d_fx_e);
  outer_accumulate(g.w_y_in, d_fy_e, inputs.y);
  add_into(g.b_fy, d_fy_e);
  if (d_fx_d) {
    outer_accumulate(g.w_x_in, *d_fx_d, x);
    add_into(g.b_fx, *d_fx_d);
  }
  if (d_fy_d) {
    outer_accumulate(g.w_y_in, *d_fy_d, y);
    add_into(g.b_fy, *d_fy_d);
  }
  return out;
}

GatedGradient backward(const GatedModel& model, const Vector& x, const Vector& y,
                       const TrainConfig& config, Rng& rng, const Vector* label) {
  const EncoderInputs in = corrupt_encoder_inputs(config.corruption, x, y, model.shape.n_f, rng);
  return backward(model, x, y, config.loss, in, label);
}

void sgd_step(GatedParams& params, const GatedParams& grads, double lr, double momentum,
              GatedParams& velocity) {
  detail::momentum_update(detail::blocks_of(params), detail::blocks_of(grads),
                          detail::blocks_of(velocity), lr, momentum);
}

namespace {

void check_dataset(const GatedModel& model, const Dataset& data, const LossMode& mode) {
  if (data.empty()) throw std::invalid_argument("training requires a non-empty dataset");
  if (data.n_x != model.shape.n_x || data.n_y != model.shape.n_y) {
    throw DimensionError("dataset dims (" + std::to_string(data.n_x) + ", " +
                         std::to_string(data.n_y) + ") do not match model (" +
                         std::to_string(model.shape.n_x) + ", " + std::to_string(model.shape.n_y) + ")");
  }
  if (mode.needs_label() && data.label_len != model.shape.n_h) {
    throw DimensionError("hybrid loss needs labels of length n_h = " + std::to_string(model.shape.n_h));
  }
}

}  // namespace

TrainResult train(GatedModel model, const Dataset& data, const TrainConfig& config) {
  model.validate();
  check_dataset(model, data, config.loss);
  const GatedParams zero = GatedParams::zeros(model.shape, model.tying);
  auto trace = detail::run_minibatch_sgd(
      model.params, data.size(), config, zero, [&](std::size_t i, Rng& rng) {
        const Example& ex = data.examples[i];
        const Vector* label = ex.label ? &*ex.label : nullptr;
        GatedGradient gg = backward(model, ex.x, ex.y, config, rng, label);
        return std::make_pair(std::move(gg.grads), gg.loss);
      });
  return TrainResult{std::move(model), std::move(trace)};
}

double mean_loss(const GatedModel& model, const Dataset& data, const LossMode& mode) {
  check_dataset(model, data, mode);
  double total = 0.0;
  for (const Example& ex : data.examples) {
    total += loss(model, ex.x, ex.y, mode, ex.label ? &*ex.label : nullptr);
  }
  return total / static_cast<double>(data.size());
}

}  // namespace gated
