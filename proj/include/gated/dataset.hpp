#pragma once
// Aligned (x, y[, label]) example pairs, synthetic generators, and the
// "GND1" binary format.
//
// GND1 layout, all integers and reals little-endian:
//   bytes 0..3   magic "GND1"
//   u32          n_examples
//   u32          n_x
//   u32          n_y
//   u32          label_len (0 = no labels)
//   f64[...]     per example: x (n_x), y (n_y), label (label_len)
//   u32          meta byte length, followed by that many UTF-8 bytes

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gated/numerics.hpp"
#include "gated/rng.hpp"

namespace gated {

struct Example {
  Vector x;
  Vector y;
  std::optional<Vector> label;

  friend bool operator==(const Example&, const Example&) = default;
};

struct Dataset {
  std::size_t n_x = 0;
  std::size_t n_y = 0;
  std::size_t label_len = 0;
  std::vector<Example> examples;
  std::string meta;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }

  /// Checks every example against n_x/n_y/label_len and that labels are one-hot.
  void validate() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Raised on malformed GND1/GNM1 input; the message carries the byte offset.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// y[(i + shift) mod n] = x[i].
Vector circular_shift(const Vector& x, long shift);
/// side x side row-major image rotated clockwise by a multiple of 90 degrees.
Vector rotate_image(const Vector& image, std::size_t side, int angle);
Vector one_hot(std::size_t n, std::size_t index);
/// Index of the single 1 in a one-hot vector; throws if v is not one-hot.
std::size_t one_hot_index(const Vector& v);

/// Random binary patterns (each bit 1 with probability density) and their
/// circular shift by `shift`. Unlabelled.
Dataset gen_shift_pairs(Rng& rng, std::size_t n, std::size_t width, long shift, double density);

/// As gen_shift_pairs, the shift of each pair drawn uniformly from `shifts`;
/// the label is the one-hot index into `shifts`.
Dataset gen_multi_shift_pairs(Rng& rng, std::size_t n, std::size_t width,
                              const std::vector<long>& shifts, double density);

/// Random binary side x side images and their lossless rotation by angle
/// in {0, 90, 180, 270}.
Dataset gen_rotation_pairs(Rng& rng, std::size_t n, std::size_t side, int angle,
                           double density = 0.5);

/// x ~ N(center, sigma^2 I) around a uniformly chosen center; y = x; label is
/// the one-hot center id.
Dataset gen_blobs(Rng& rng, std::size_t n, std::size_t dim, const std::vector<Vector>& centers,
                  double sigma);

/// One-hot symbols repeating `pattern` over `length` steps; each example is
/// (symbol_t, symbol_{t+1}). Consecutive examples form one sequence.
Dataset gen_periodic_sequence(std::size_t length, std::size_t alphabet,
                              const std::vector<std::size_t>& pattern);

std::string encode_dataset(const Dataset& data);
Dataset decode_dataset(const std::string& bytes);
void save_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace gated
