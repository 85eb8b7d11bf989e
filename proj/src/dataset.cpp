#include "gated/dataset.hpp"

#include <fstream>
#include <limits>
#include <sstream>

#include "binary_io.hpp"

namespace gated {

namespace detail {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace detail

namespace {

constexpr std::string_view kMagic = "GND1";

Vector random_binary(Rng& rng, std::size_t n, double density) {
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = rng.bernoulli(density) ? 1.0 : 0.0;
  return v;
}

std::string describe(const std::string& generator, const std::string& params) {
  return "generator=" + generator + ";" + params + ";rng=" + std::string(kRngDescription);
}

}  // namespace

void Dataset::validate() const {
  for (std::size_t e = 0; e < examples.size(); ++e) {
    const Example& ex = examples[e];
    const std::string where = "example " + std::to_string(e) + ": ";
    if (ex.x.size() != n_x) throw DimensionError(where + "x length " + std::to_string(ex.x.size()) + " != n_x " + std::to_string(n_x));
    if (ex.y.size() != n_y) throw DimensionError(where + "y length " + std::to_string(ex.y.size()) + " != n_y " + std::to_string(n_y));
    if (label_len == 0) {
      if (ex.label) throw DimensionError(where + "label present in an unlabelled dataset");
    } else {
      if (!ex.label || ex.label->size() != label_len) {
        throw DimensionError(where + "label missing or not of length " + std::to_string(label_len));
      }
      one_hot_index(*ex.label);
    }
  }
}

Vector circular_shift(const Vector& x, long shift) {
  const long n = static_cast<long>(x.size());
  Vector y(x.size());
  if (n == 0) return y;
  const long s = ((shift % n) + n) % n;
  for (long i = 0; i < n; ++i) y[static_cast<std::size_t>((i + s) % n)] = x[static_cast<std::size_t>(i)];
  return y;
}

Vector rotate_image(const Vector& image, std::size_t side, int angle) {
  if (image.size() != side * side) {
    throw DimensionError("rotate_image: " + std::to_string(image.size()) +
                         " pixels is not a " + std::to_string(side) + "x" + std::to_string(side) + " image");
  }
  if (angle != 0 && angle != 90 && angle != 180 && angle != 270) {
    throw std::invalid_argument("rotate_image: angle must be one of 0, 90, 180, 270 (got " +
                                std::to_string(angle) + ")");
  }
  Vector out = image;
  for (int turn = 0; turn < angle / 90; ++turn) {
    Vector next(out.size());
    // Clockwise quarter turn: destination (r, c) takes source (side-1-c, r).
    for (std::size_t r = 0; r < side; ++r)
      for (std::size_t c = 0; c < side; ++c) next[r * side + c] = out[(side - 1 - c) * side + r];
    out = std::move(next);
  }
  return out;
}

Vector one_hot(std::size_t n, std::size_t index) {
  if (index >= n) throw DimensionError("one_hot: index " + std::to_string(index) + " out of range " + std::to_string(n));
  Vector v(n);
  v[index] = 1.0;
  return v;
}

std::size_t one_hot_index(const Vector& v) {
  std::size_t hot = v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 1.0 && hot == v.size()) {
      hot = i;
    } else if (v[i] != 0.0) {
      throw std::invalid_argument("vector is not one-hot (entry " + std::to_string(i) + ")");
    }
  }
  if (hot == v.size()) throw std::invalid_argument("vector is not one-hot (no entry equal to 1)");
  return hot;
}

Dataset gen_shift_pairs(Rng& rng, std::size_t n, std::size_t width, long shift, double density) {
  if (width == 0) throw std::invalid_argument("gen_shift_pairs: width must be >= 1");
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("gen_shift_pairs: density must be in [0,1]");
  Dataset data{width, width, 0, {}, {}};
  data.examples.reserve(n);
  for (std::size_t e = 0; e < n; ++e) {
    Vector x = random_binary(rng, width, density);
    Vector y = circular_shift(x, shift);
    data.examples.push_back({std::move(x), std::move(y), std::nullopt});
  }
  data.meta = describe("shift", "n=" + std::to_string(n) + ";width=" + std::to_string(width) +
                                    ";shift=" + std::to_string(shift) + ";density=" + std::to_string(density));
  return data;
}

Dataset gen_multi_shift_pairs(Rng& rng, std::size_t n, std::size_t width,
                              const std::vector<long>& shifts, double density) {
  if (width == 0) throw std::invalid_argument("gen_multi_shift_pairs: width must be >= 1");
  if (shifts.empty()) throw std::invalid_argument("gen_multi_shift_pairs: no shifts given");
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("gen_multi_shift_pairs: density must be in [0,1]");
  Dataset data{width, width, shifts.size(), {}, {}};
  std::string shift_list;
  for (long s : shifts) shift_list += (shift_list.empty() ? "" : ",") + std::to_string(s);
  for (std::size_t e = 0; e < n; ++e) {
    Vector x = random_binary(rng, width, density);
    const std::size_t which = rng.uniform_index(shifts.size());
    Vector y = circular_shift(x, shifts[which]);
    data.examples.push_back({std::move(x), std::move(y), one_hot(shifts.size(), which)});
  }
  data.meta = describe("multishift", "n=" + std::to_string(n) + ";width=" + std::to_string(width) +
                                         ";shifts=" + shift_list + ";density=" + std::to_string(density));
  return data;
}

Dataset gen_rotation_pairs(Rng& rng, std::size_t n, std::size_t side, int angle, double density) {
  if (side == 0) throw std::invalid_argument("gen_rotation_pairs: side must be >= 1");
  if (angle != 0 && angle != 90 && angle != 180 && angle != 270) {
    throw std::invalid_argument("gen_rotation_pairs: only lossless angles 0, 90, 180, 270 are supported (got " +
                                std::to_string(angle) + ")");
  }
  Dataset data{side * side, side * side, 0, {}, {}};
  for (std::size_t e = 0; e < n; ++e) {
    Vector x = random_binary(rng, side * side, density);
    Vector y = rotate_image(x, side, angle);
    data.examples.push_back({std::move(x), std::move(y), std::nullopt});
  }
  data.meta = describe("rotation", "n=" + std::to_string(n) + ";side=" + std::to_string(side) +
                                       ";angle=" + std::to_string(angle));
  return data;
}

Dataset gen_blobs(Rng& rng, std::size_t n, std::size_t dim, const std::vector<Vector>& centers,
                  double sigma) {
  if (centers.size() < 2) throw std::invalid_argument("gen_blobs: need at least two centers");
  if (!(sigma >= 0.0)) throw std::invalid_argument("gen_blobs: sigma must be >= 0");
  for (const Vector& c : centers) {
    if (c.size() != dim) throw DimensionError("gen_blobs: center length " + std::to_string(c.size()) + " != dim " + std::to_string(dim));
  }
  Dataset data{dim, dim, centers.size(), {}, {}};
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t which = rng.uniform_index(centers.size());
    Vector x(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = centers[which][i] + sigma * rng.gaussian();
    Vector y = x;
    data.examples.push_back({std::move(x), std::move(y), one_hot(centers.size(), which)});
  }
  data.meta = describe("blobs", "n=" + std::to_string(n) + ";dim=" + std::to_string(dim) +
                                    ";centers=" + std::to_string(centers.size()) + ";sigma=" + std::to_string(sigma));
  return data;
}

Dataset gen_periodic_sequence(std::size_t length, std::size_t alphabet,
                              const std::vector<std::size_t>& pattern) {
  if (pattern.empty()) throw std::invalid_argument("gen_periodic_sequence: empty pattern");
  for (std::size_t s : pattern) {
    if (s >= alphabet) throw std::invalid_argument("gen_periodic_sequence: symbol outside alphabet");
  }
  Dataset data{alphabet, alphabet, 0, {}, {}};
  std::string pat;
  for (std::size_t s : pattern) pat += (pat.empty() ? "" : ",") + std::to_string(s);
  for (std::size_t t = 0; t < length; ++t) {
    data.examples.push_back({one_hot(alphabet, pattern[t % pattern.size()]),
                             one_hot(alphabet, pattern[(t + 1) % pattern.size()]), std::nullopt});
  }
  data.meta = "generator=period;length=" + std::to_string(length) + ";alphabet=" +
              std::to_string(alphabet) + ";pattern=" + pat;
  return data;
}

std::string encode_dataset(const Dataset& data) {
  data.validate();
  const auto narrow = [](std::size_t v, const char* what) {
    if (v > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument(std::string(what) + " too large for GND1");
    return static_cast<std::uint32_t>(v);
  };
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u32(narrow(data.size(), "n_examples"));
  w.u32(narrow(data.n_x, "n_x"));
  w.u32(narrow(data.n_y, "n_y"));
  w.u32(narrow(data.label_len, "label_len"));
  for (const Example& ex : data.examples) {
    w.f64s(ex.x.span());
    w.f64s(ex.y.span());
    if (ex.label) w.f64s(ex.label->span());
  }
  w.str(data.meta);
  return w.take();
}

Dataset decode_dataset(const std::string& bytes) {
  detail::ByteReader r(bytes, "GND1");
  if (r.bytes(4, "magic") != kMagic) {
    throw FormatError("GND1: bad magic, expected \"GND1\" (at byte offset 0)");
  }
  const std::uint32_t count = r.u32("n_examples");
  Dataset data;
  data.n_x = r.u32("n_x");
  data.n_y = r.u32("n_y");
  data.label_len = r.u32("label_len");
  const std::size_t per_example = 8 * (data.n_x + data.n_y + data.label_len);
  if (per_example != 0 && (bytes.size() - r.offset()) / per_example < count) {
    r.fail("truncated payload: header declares " + std::to_string(count) + " examples of " +
           std::to_string(per_example) + " bytes");
  }
  data.examples.reserve(count);
  for (std::uint32_t e = 0; e < count; ++e) {
    Example ex{Vector(data.n_x), Vector(data.n_y), std::nullopt};
    r.f64s(ex.x.span(), "example x");
    r.f64s(ex.y.span(), "example y");
    if (data.label_len > 0) {
      ex.label = Vector(data.label_len);
      r.f64s(ex.label->span(), "example label");
    }
    data.examples.push_back(std::move(ex));
  }
  data.meta = r.str("meta string");
  if (!r.at_end()) r.fail("trailing bytes after meta string");
  try {
    data.validate();
  } catch (const std::exception& e) {
    throw FormatError(std::string("GND1: invalid content: ") + e.what());
  }
  return data;
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  detail::write_file(path, encode_dataset(data));
}

Dataset load_dataset(const std::filesystem::path& path) {
  return decode_dataset(detail::read_file(path));
}

}  // namespace gated
