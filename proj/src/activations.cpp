#include "gated/activations.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gated {
namespace {

void require_finite(const Vector& z) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) {
      throw std::domain_error("activate: non-finite input at index " + std::to_string(i));
    }
  }
}

Vector softmax(const Vector& z) {
  if (z.empty()) throw DimensionError("softmax of an empty layer");
  const double m = *std::max_element(z.begin(), z.end());
  Vector out(z.size());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - m);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace

std::string_view to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Identity: return "identity";
    case ActivationKind::Sigmoid: return "sigmoid";
    case ActivationKind::Relu: return "relu";
    case ActivationKind::Softplus: return "softplus";
    case ActivationKind::Softmax: return "softmax";
  }
  return "?";
}

ActivationKind parse_activation(std::string_view name) {
  for (auto kind : {ActivationKind::Identity, ActivationKind::Sigmoid, ActivationKind::Relu,
                    ActivationKind::Softplus, ActivationKind::Softmax}) {
    if (to_string(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

ActivationKind activation_from_code(std::uint8_t code) {
  if (code > static_cast<std::uint8_t>(ActivationKind::Softmax)) {
    throw std::invalid_argument("unknown activation code " + std::to_string(code));
  }
  return static_cast<ActivationKind>(code);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double log_sum_exp(const Vector& z) {
  if (z.empty()) throw DimensionError("log_sum_exp of an empty vector");
  const double m = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double v : z) total += std::exp(v - m);
  return m + std::log(total);
}

Vector activate(ActivationKind kind, const Vector& z) {
  require_finite(z);
  Vector out(z.size());
  switch (kind) {
    case ActivationKind::Identity:
      return z;
    case ActivationKind::Sigmoid:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = sigmoid(z[i]);
      return out;
    case ActivationKind::Relu:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? z[i] : 0.0;
      return out;
    case ActivationKind::Softplus:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = softplus(z[i]);
      return out;
    case ActivationKind::Softmax:
      return softmax(z);
  }
  throw std::logic_error("activate: bad kind");
}

Vector activate_grad(ActivationKind kind, const Vector& z, const Vector& upstream) {
  if (z.size() != upstream.size()) {
    throw DimensionError("activate_grad: input length " + std::to_string(z.size()) +
                         " vs upstream length " + std::to_string(upstream.size()));
  }
  Vector out(z.size());
  switch (kind) {
    case ActivationKind::Identity:
      return upstream;
    case ActivationKind::Sigmoid:
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double s = sigmoid(z[i]);
        out[i] = s * (1.0 - s) * upstream[i];
      }
      return out;
    case ActivationKind::Relu:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] > 0.0 ? upstream[i] : 0.0;
      return out;
    case ActivationKind::Softplus:
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = sigmoid(z[i]) * upstream[i];
      return out;
    case ActivationKind::Softmax: {
      // J = diag(s) - s s^T is symmetric: out_i = s_i (u_i - <s, u>).
      const Vector s = softmax(z);
      const double su = dot(s, upstream);
      for (std::size_t i = 0; i < z.size(); ++i) out[i] = s[i] * (upstream[i] - su);
      return out;
    }
  }
  throw std::logic_error("activate_grad: bad kind");
}

Vector argmax_onehot(const Vector& v) {
  Vector out(v.size());
  out[argmax(v)] = 1.0;
  return out;
}

}  // namespace gated
