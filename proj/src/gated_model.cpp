#include "gated/gated_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gated {
namespace {

std::string size_error(const char* op, const char* what, std::size_t got, std::size_t want) {
  return std::string(op) + ": " + what + " has length " + std::to_string(got) + ", expected " +
         std::to_string(want);
}

void require_len(const char* op, const char* what, const Vector& v, std::size_t want) {
  if (v.size() != want) throw DimensionError(size_error(op, what, v.size(), want));
}

void require_shape(const char* what, const Matrix& m, std::size_t rows, std::size_t cols) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + " is " + m.shape_string() + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
}

}  // namespace

std::string_view to_string(TyingMode mode) {
  return mode == TyingMode::Tied ? "tied" : "untied";
}

TyingMode parse_tying(std::string_view name) {
  if (name == "tied") return TyingMode::Tied;
  if (name == "untied") return TyingMode::Untied;
  throw std::invalid_argument("unknown tying mode '" + std::string(name) + "'");
}

std::size_t GatedShape::layer_size(Layer layer) const {
  switch (layer) {
    case Layer::X: return n_x;
    case Layer::Y: return n_y;
    case Layer::H: return n_h;
  }
  return 0;
}

GatedParams GatedParams::zeros(const GatedShape& s, TyingMode tying) {
  GatedParams p{Matrix(s.n_f, s.n_x), Matrix(s.n_f, s.n_y), Matrix(s.n_f, s.n_h),
                std::nullopt,         std::nullopt,         std::nullopt,
                Vector(s.n_f),        Vector(s.n_f),        Vector(s.n_f),
                Vector(s.n_x),        Vector(s.n_y),        Vector(s.n_h)};
  if (tying == TyingMode::Untied) {
    p.w_x_out.emplace(s.n_x, s.n_f);
    p.w_y_out.emplace(s.n_y, s.n_f);
    p.w_h_out.emplace(s.n_h, s.n_f);
  }
  return p;
}

void GatedParams::for_each_block(
    const std::function<void(std::string_view, std::span<double>)>& fn) {
  fn("W_x_in", w_x_in.span());
  fn("W_y_in", w_y_in.span());
  fn("W_h_in", w_h_in.span());
  if (w_x_out) fn("W_x_out", w_x_out->span());
  if (w_y_out) fn("W_y_out", w_y_out->span());
  if (w_h_out) fn("W_h_out", w_h_out->span());
  fn("b_fx", b_fx.span());
  fn("b_fy", b_fy.span());
  fn("b_fh", b_fh.span());
  fn("b_x", b_x.span());
  fn("b_y", b_y.span());
  fn("b_h", b_h.span());
}

void GatedParams::for_each_block(
    const std::function<void(std::string_view, std::span<const double>)>& fn) const {
  const_cast<GatedParams*>(this)->for_each_block(
      [&](std::string_view name, std::span<double> block) { fn(name, block); });
}

double default_init_sigma(std::size_t n_f) { return 0.01 / std::sqrt(static_cast<double>(n_f)); }

GatedModel GatedModel::zeros(const GatedShape& shape, TyingMode tying, ActivationKind act_x,
                             ActivationKind act_y, ActivationKind act_h) {
  if (shape.n_x == 0 || shape.n_y == 0 || shape.n_h == 0 || shape.n_f == 0) {
    throw DimensionError("gated model layer sizes must be positive");
  }
  return GatedModel{shape, GatedParams::zeros(shape, tying), act_x, act_y, act_h, tying};
}

GatedModel GatedModel::random(const GatedShape& shape, TyingMode tying, ActivationKind act_x,
                              ActivationKind act_y, ActivationKind act_h, Rng& rng,
                              double sigma) {
  GatedModel model = zeros(shape, tying, act_x, act_y, act_h);
  if (sigma < 0.0) sigma = default_init_sigma(shape.n_f);
  auto fill = [&](Matrix& m) {
    for (double& w : m.span()) w = sigma * rng.gaussian();
  };
  fill(model.params.w_x_in);
  fill(model.params.w_y_in);
  fill(model.params.w_h_in);
  if (tying == TyingMode::Untied) {
    fill(*model.params.w_x_out);
    fill(*model.params.w_y_out);
    fill(*model.params.w_h_out);
  }
  return model;
}

const Matrix& GatedModel::in_matrix(Layer layer) const {
  switch (layer) {
    case Layer::X: return params.w_x_in;
    case Layer::Y: return params.w_y_in;
    case Layer::H: return params.w_h_in;
  }
  throw std::logic_error("bad layer");
}

const Vector& GatedModel::factor_bias(Layer layer) const {
  switch (layer) {
    case Layer::X: return params.b_fx;
    case Layer::Y: return params.b_fy;
    case Layer::H: return params.b_fh;
  }
  throw std::logic_error("bad layer");
}

const Vector& GatedModel::output_bias(Layer layer) const {
  switch (layer) {
    case Layer::X: return params.b_x;
    case Layer::Y: return params.b_y;
    case Layer::H: return params.b_h;
  }
  throw std::logic_error("bad layer");
}

ActivationKind GatedModel::activation(Layer layer) const {
  switch (layer) {
    case Layer::X: return act_x;
    case Layer::Y: return act_y;
    case Layer::H: return act_h;
  }
  throw std::logic_error("bad layer");
}

namespace {

const std::optional<Matrix>& out_slot(const GatedParams& p, Layer layer) {
  switch (layer) {
    case Layer::X: return p.w_x_out;
    case Layer::Y: return p.w_y_out;
    case Layer::H: return p.w_h_out;
  }
  throw std::logic_error("bad layer");
}

}  // namespace

Vector GatedModel::apply_out(Layer layer, const Vector& p) const {
  if (tying == TyingMode::Tied) return matvec_t(in_matrix(layer), p);
  return matvec(*out_slot(params, layer), p);
}

Vector GatedModel::apply_out_t(Layer layer, const Vector& d) const {
  if (tying == TyingMode::Tied) return matvec(in_matrix(layer), d);
  return matvec_t(*out_slot(params, layer), d);
}

void GatedModel::validate() const {
  const auto& s = shape;
  require_shape("W_x_in", params.w_x_in, s.n_f, s.n_x);
  require_shape("W_y_in", params.w_y_in, s.n_f, s.n_y);
  require_shape("W_h_in", params.w_h_in, s.n_f, s.n_h);
  const bool untied = tying == TyingMode::Untied;
  if (untied != params.w_x_out.has_value() || untied != params.w_y_out.has_value() ||
      untied != params.w_h_out.has_value()) {
    throw DimensionError("out-matrices must be present exactly when weights are untied");
  }
  if (untied) {
    require_shape("W_x_out", *params.w_x_out, s.n_x, s.n_f);
    require_shape("W_y_out", *params.w_y_out, s.n_y, s.n_f);
    require_shape("W_h_out", *params.w_h_out, s.n_h, s.n_f);
  }
  require_len("model", "b_fx", params.b_fx, s.n_f);
  require_len("model", "b_fy", params.b_fy, s.n_f);
  require_len("model", "b_fh", params.b_fh, s.n_f);
  require_len("model", "b_x", params.b_x, s.n_x);
  require_len("model", "b_y", params.b_y, s.n_y);
  require_len("model", "b_h", params.b_h, s.n_h);
}

Vector project_factor(const GatedModel& model, Layer which, const Vector& v) {
  require_len("project_factor", "input", v, model.shape.layer_size(which));
  return add(matvec(model.in_matrix(which), v), model.factor_bias(which));
}

namespace {

// s_out(W_out (f_a * f_b) + b_out)
Vector predict(const GatedModel& model, Layer out, Layer in_a, const Vector& a, Layer in_b,
               const Vector& b) {
  const Vector product = hadamard(project_factor(model, in_a, a), project_factor(model, in_b, b));
  const Vector pre = add(model.apply_out(out, product), model.output_bias(out));
  return activate(model.activation(out), pre);
}

}  // namespace

Vector predict_y(const GatedModel& model, const Vector& x, const Vector& h) {
  return predict(model, Layer::Y, Layer::X, x, Layer::H, h);
}

Vector predict_x(const GatedModel& model, const Vector& y, const Vector& h) {
  return predict(model, Layer::X, Layer::Y, y, Layer::H, h);
}

Vector predict_h(const GatedModel& model, const Vector& x, const Vector& y) {
  return predict(model, Layer::H, Layer::X, x, Layer::Y, y);
}

DenseTensor::DenseTensor(std::size_t n_x, std::size_t n_y, std::size_t n_h)
    : n_x_(n_x), n_y_(n_y), n_h_(n_h), w_(n_x * n_y * n_h, 0.0) {}

DenseTensor materialize_tensor(const GatedModel& model) {
  if (model.tying != TyingMode::Tied) {
    throw std::invalid_argument(
        "materialize_tensor: untied models use a different tensor per prediction direction; "
        "only tied models define a single 3-way tensor");
  }
  for (const Vector* b : {&model.params.b_fx, &model.params.b_fy, &model.params.b_fh}) {
    for (double v : *b) {
      if (v != 0.0) {
        throw std::invalid_argument(
            "materialize_tensor: factor biases must be zero; the dense 3-way product has no "
            "factor-bias term");
      }
    }
  }
  const auto& s = model.shape;
  const Matrix& wx = model.params.w_x_in;
  const Matrix& wy = model.params.w_y_in;
  const Matrix& wh = model.params.w_h_in;
  DenseTensor t(s.n_x, s.n_y, s.n_h);
  for (std::size_t i = 0; i < s.n_x; ++i)
    for (std::size_t j = 0; j < s.n_y; ++j)
      for (std::size_t k = 0; k < s.n_h; ++k) {
        double acc = 0.0;
        for (std::size_t f = 0; f < s.n_f; ++f) acc += wx(f, i) * wy(f, j) * wh(f, k);
        t(i, j, k) = acc;
      }
  return t;
}

Vector dense_predict_y(const DenseTensor& t, const Vector& x, const Vector& h, ActivationKind act) {
  require_len("dense_predict_y", "x", x, t.n_x());
  require_len("dense_predict_y", "h", h, t.n_h());
  Vector pre(t.n_y());
  for (std::size_t j = 0; j < t.n_y(); ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.n_x(); ++i)
      for (std::size_t k = 0; k < t.n_h(); ++k) acc += t(i, j, k) * x[i] * h[k];
    pre[j] = acc;
  }
  return activate(act, pre);
}

Vector dense_predict_x(const DenseTensor& t, const Vector& y, const Vector& h, ActivationKind act) {
  require_len("dense_predict_x", "y", y, t.n_y());
  require_len("dense_predict_x", "h", h, t.n_h());
  Vector pre(t.n_x());
  for (std::size_t i = 0; i < t.n_x(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < t.n_y(); ++j)
      for (std::size_t k = 0; k < t.n_h(); ++k) acc += t(i, j, k) * y[j] * h[k];
    pre[i] = acc;
  }
  return activate(act, pre);
}

Vector dense_predict_h(const DenseTensor& t, const Vector& x, const Vector& y, ActivationKind act) {
  require_len("dense_predict_h", "x", x, t.n_x());
  require_len("dense_predict_h", "y", y, t.n_y());
  Vector pre(t.n_h());
  for (std::size_t k = 0; k < t.n_h(); ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.n_x(); ++i)
      for (std::size_t j = 0; j < t.n_y(); ++j) acc += t(i, j, k) * x[i] * y[j];
    pre[k] = acc;
  }
  return activate(act, pre);
}

ParamCount param_count(const GatedShape& s, TyingMode tying) {
  const std::size_t tied = s.n_f * (s.n_x + s.n_y + s.n_h);
  return ParamCount{tying == TyingMode::Tied ? tied : 2 * tied,
                    3 * s.n_f + s.n_x + s.n_y + s.n_h};
}

ParamCount param_count(const GatedModel& model) { return param_count(model.shape, model.tying); }

std::size_t dense_param_count(std::size_t n_x, std::size_t n_y, std::size_t n_h) {
  return n_x * n_y * n_h;
}

GatedModel swap_xy_roles(const GatedModel& m) {
  GatedModel s = m;
  std::swap(s.shape.n_x, s.shape.n_y);
  std::swap(s.params.w_x_in, s.params.w_y_in);
  std::swap(s.params.w_x_out, s.params.w_y_out);
  std::swap(s.params.b_fx, s.params.b_fy);
  std::swap(s.params.b_x, s.params.b_y);
  std::swap(s.act_x, s.act_y);
  return s;
}

}  // namespace gated
