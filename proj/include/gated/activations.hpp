#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "gated/numerics.hpp"

namespace gated {

/// Values are the on-disk u8 codes; do not renumber.
enum class ActivationKind : std::uint8_t {
  Identity = 0,
  Sigmoid = 1,
  Relu = 2,
  Softplus = 3,
  Softmax = 4,
};

std::string_view to_string(ActivationKind kind);
ActivationKind parse_activation(std::string_view name);
ActivationKind activation_from_code(std::uint8_t code);

/// Softmax acts on the whole vector; the other kinds act per coordinate.
/// Non-finite input is rejected with std::domain_error.
Vector activate(ActivationKind kind, const Vector& z);

/// J^T * upstream, J the Jacobian of activate at z. The Relu subgradient at 0 is 0.
Vector activate_grad(ActivationKind kind, const Vector& z, const Vector& upstream);

double sigmoid(double z);
double softplus(double z);
/// log(sum_i exp(z_i)), max-shifted.
double log_sum_exp(const Vector& z);

/// Winner-takes-all: 1 at the first maximal entry, 0 elsewhere. Never used
/// inside a gradient path.
Vector argmax_onehot(const Vector& v);

}  // namespace gated
