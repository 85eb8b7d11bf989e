#include "gated/mrnn.hpp"

#include "gated/activations.hpp"

#include <cmath>
#include <stdexcept>

#include "optim.hpp"

namespace gated {

MRnnModel MRnnModel::zeros(std::size_t n_x, std::size_t n_h, std::size_t n_f) {
  if (n_x == 0 || n_h == 0 || n_f == 0) throw DimensionError("mRNN sizes must be positive");
  return MRnnModel{n_x,           n_h,           n_f,          Matrix(n_f, n_x),
                   Matrix(n_f, n_h), Matrix(n_h, n_f), Matrix(n_h, n_x), Matrix(n_x, n_h),
                   Vector(n_x),   Vector(n_h)};
}

MRnnModel MRnnModel::random(std::size_t n_x, std::size_t n_h, std::size_t n_f, Rng& rng,
                            double sigma) {
  MRnnModel m = zeros(n_x, n_h, n_f);
  for (Matrix* w : {&m.w_fx, &m.w_fh, &m.w_hf, &m.w_hx, &m.w_out})
    for (double& v : w->span()) v = sigma * rng.gaussian();
  return m;
}

void MRnnModel::validate() const {
  auto check = [](const char* name, const Matrix& m, std::size_t r, std::size_t c) {
    if (m.rows() != r || m.cols() != c) {
      throw DimensionError(std::string(name) + " is " + m.shape_string() + ", expected " +
                           std::to_string(r) + "x" + std::to_string(c));
    }
  };
  check("W_fx", w_fx, n_f, n_x);
  check("W_fh", w_fh, n_f, n_h);
  check("W_hf", w_hf, n_h, n_f);
  check("W_hx", w_hx, n_h, n_x);
  check("W_out", w_out, n_x, n_h);
  if (b_y.size() != n_x) throw DimensionError("b_y length does not match n_x");
  if (h0.size() != n_h) throw DimensionError("h0 length does not match n_h");
}

void MRnnModel::for_each_block(
    const std::function<void(std::string_view, std::span<double>)>& fn) {
  fn("W_fx", w_fx.span());
  fn("W_fh", w_fh.span());
  fn("W_hf", w_hf.span());
  fn("W_hx", w_hx.span());
  fn("W_out", w_out.span());
  fn("b_y", b_y.span());
  fn("h0", h0.span());
}

void MRnnModel::for_each_block(
    const std::function<void(std::string_view, std::span<const double>)>& fn) const {
  const_cast<MRnnModel*>(this)->for_each_block(
      [&](std::string_view name, std::span<double> block) { fn(name, block); });
}

namespace {

Vector tanh_of(const Vector& z) {
  Vector out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = std::tanh(z[i]);
  return out;
}

struct StepTape {
  Vector a;       // W_fx x_t
  Vector b;       // W_fh h_{t-1}
  Vector f;
  Vector h;
  Vector y_hat;
};

StepTape step_tape(const MRnnModel& m, const Vector& x, const Vector& h_prev) {
  if (x.size() != m.n_x) {
    throw DimensionError("mRNN input has length " + std::to_string(x.size()) + ", expected " +
                         std::to_string(m.n_x));
  }
  if (h_prev.size() != m.n_h) {
    throw DimensionError("mRNN state has length " + std::to_string(h_prev.size()) +
                         ", expected " + std::to_string(m.n_h));
  }
  StepTape t;
  t.a = matvec(m.w_fx, x);
  t.b = matvec(m.w_fh, h_prev);
  t.f = hadamard(t.a, t.b);
  t.h = tanh_of(add(matvec(m.w_hf, t.f), matvec(m.w_hx, x)));
  t.y_hat = add(matvec(m.w_out, t.h), m.b_y);
  return t;
}

void check_sequence(const SequencePair& seq) {
  if (seq.inputs.empty()) throw std::invalid_argument("mRNN sequence is empty");
  if (seq.inputs.size() != seq.targets.size()) {
    throw std::invalid_argument("mRNN sequence has " + std::to_string(seq.inputs.size()) +
                                " inputs but " + std::to_string(seq.targets.size()) + " targets");
  }
}

// Loss of one step; writes dL/dy_hat into `dy`.
double step_loss(const Vector& y_hat, const Vector& target, MRnnLoss kind, Vector& dy) {
  if (kind == MRnnLoss::Squared) {
    dy = subtract(y_hat, target);
    return 0.5 * squared_norm(dy.span());
  }
  const double lse = log_sum_exp(y_hat);
  double mass = 0.0;
  double loss = 0.0;
  for (std::size_t i = 0; i < target.size(); ++i) {
    mass += target[i];
    loss += target[i] * (lse - y_hat[i]);
  }
  dy = scaled(activate(ActivationKind::Softmax, y_hat), mass);
  axpy(-1.0, target.span(), dy.span());
  return loss;
}

}  // namespace

std::string_view to_string(MRnnLoss loss) {
  return loss == MRnnLoss::Squared ? "squared" : "cross_entropy";
}

MRnnLoss parse_mrnn_loss(std::string_view name) {
  if (name == "squared") return MRnnLoss::Squared;
  if (name == "cross_entropy") return MRnnLoss::SoftmaxCrossEntropy;
  throw std::invalid_argument("unknown mRNN loss '" + std::string(name) + "'");
}

MRnnStep mrnn_step(const MRnnModel& model, const Vector& x_t, const Vector& h_prev) {
  StepTape t = step_tape(model, x_t, h_prev);
  return MRnnStep{std::move(t.h), std::move(t.y_hat)};
}

std::vector<Vector> mrnn_forward(const MRnnModel& model, const std::vector<Vector>& xs) {
  if (xs.empty()) throw std::invalid_argument("mrnn_forward: empty input sequence");
  std::vector<Vector> out;
  out.reserve(xs.size());
  Vector h = model.h0;
  for (const Vector& x : xs) {
    MRnnStep s = mrnn_step(model, x, h);
    h = std::move(s.h);
    out.push_back(std::move(s.y_hat));
  }
  return out;
}

double mrnn_loss(const MRnnModel& model, const SequencePair& seq, MRnnLoss kind) {
  check_sequence(seq);
  const std::vector<Vector> ys = mrnn_forward(model, seq.inputs);
  double total = 0.0;
  Vector dy;
  for (std::size_t t = 0; t < ys.size(); ++t) {
    if (seq.targets[t].size() != model.n_x) throw DimensionError("mRNN target length mismatch");
    total += step_loss(ys[t], seq.targets[t], kind, dy);
  }
  return total;
}

MRnnGradient mrnn_gradients(const MRnnModel& m, const SequencePair& seq, MRnnLoss kind) {
  check_sequence(seq);
  const std::size_t steps = seq.inputs.size();
  std::vector<StepTape> tapes;
  tapes.reserve(steps);
  double loss = 0.0;
  std::vector<Vector> dys(steps);
  {
    const Vector* h_prev = &m.h0;
    for (std::size_t t = 0; t < steps; ++t) {
      tapes.push_back(step_tape(m, seq.inputs[t], *h_prev));
      h_prev = &tapes.back().h;
      if (seq.targets[t].size() != m.n_x) throw DimensionError("mRNN target length mismatch");
      loss += step_loss(tapes.back().y_hat, seq.targets[t], kind, dys[t]);
    }
  }

  MRnnGradient out{MRnnModel::zeros(m.n_x, m.n_h, m.n_f), loss};
  MRnnModel& g = out.grads;
  Vector dh_next(m.n_h);  // gradient reaching h_t from step t+1
  for (std::size_t t = steps; t-- > 0;) {
    const StepTape& tp = tapes[t];
    const Vector& x = seq.inputs[t];
    const Vector& h_prev = t == 0 ? m.h0 : tapes[t - 1].h;

    const Vector& dy = dys[t];
    outer_accumulate(g.w_out, dy, tp.h);
    axpy(1.0, dy.span(), g.b_y.span());

    Vector dh = matvec_t(m.w_out, dy);
    axpy(1.0, dh_next.span(), dh.span());
    Vector dz(m.n_h);
    for (std::size_t i = 0; i < m.n_h; ++i) dz[i] = dh[i] * (1.0 - tp.h[i] * tp.h[i]);

    outer_accumulate(g.w_hf, dz, tp.f);
    outer_accumulate(g.w_hx, dz, x);
    const Vector df = matvec_t(m.w_hf, dz);
    const Vector da = hadamard(df, tp.b);
    const Vector db = hadamard(df, tp.a);
    outer_accumulate(g.w_fx, da, x);
    outer_accumulate(g.w_fh, db, h_prev);
    dh_next = matvec_t(m.w_fh, db);
  }
  g.h0 = dh_next;
  return out;
}

MRnnTrainResult mrnn_train(MRnnModel model, const std::vector<SequencePair>& sequences,
                           const TrainConfig& config, MRnnLoss kind) {
  model.validate();
  if (sequences.empty()) throw std::invalid_argument("mrnn_train: no sequences");
  for (const SequencePair& s : sequences) check_sequence(s);
  const MRnnModel zero = MRnnModel::zeros(model.n_x, model.n_h, model.n_f);
  auto trace = detail::run_minibatch_sgd(
      model, sequences.size(), config, zero,
      [&](std::size_t i, Rng&) {
        MRnnGradient mg = mrnn_gradients(model, sequences[i], kind);
        return std::make_pair(std::move(mg.grads), mg.loss);
      },
      kMRnnClipNorm);
  return MRnnTrainResult{std::move(model), std::move(trace)};
}

std::vector<SequencePair> sequences_from_dataset(const Dataset& data, std::size_t seq_len) {
  if (seq_len == 0) throw std::invalid_argument("seq_len must be >= 1");
  if (data.empty()) throw std::invalid_argument("sequence dataset is empty");
  if (data.n_x != data.n_y) throw DimensionError("sequence dataset needs n_x == n_y");
  std::vector<SequencePair> out;
  for (std::size_t begin = 0; begin < data.size(); begin += seq_len) {
    SequencePair s;
    for (std::size_t t = begin; t < std::min(data.size(), begin + seq_len); ++t) {
      s.inputs.push_back(data.examples[t].x);
      s.targets.push_back(data.examples[t].y);
    }
    out.push_back(std::move(s));
  }
  return out;
}

double mrnn_argmax_accuracy(const MRnnModel& model, const SequencePair& seq) {
  check_sequence(seq);
  const std::vector<Vector> ys = mrnn_forward(model, seq.inputs);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < ys.size(); ++t)
    if (argmax(ys[t]) == argmax(seq.targets[t])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(ys.size());
}

}  // namespace gated
