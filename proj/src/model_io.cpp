#include "gated/model_io.hpp"

#include <limits>

#include "binary_io.hpp"

namespace gated {
namespace {

constexpr std::string_view kMagic = "GNM1";
constexpr std::uint8_t kVersion = 1;

enum class Kind : std::uint8_t { Gae = 0, Clustering = 1, MRnn = 2 };

std::uint32_t narrow(std::size_t v) {
  if (v > std::numeric_limits<std::uint32_t>::max()) throw std::invalid_argument("size too large for GNM1");
  return static_cast<std::uint32_t>(v);
}

void write_gated_descriptor(detail::ByteWriter& w, const GatedModel& m, const LossMode& loss) {
  w.u32(narrow(m.shape.n_x));
  w.u32(narrow(m.shape.n_y));
  w.u32(narrow(m.shape.n_h));
  w.u32(narrow(m.shape.n_f));
  w.u8(static_cast<std::uint8_t>(m.tying));
  w.u8(static_cast<std::uint8_t>(m.act_x));
  w.u8(static_cast<std::uint8_t>(m.act_y));
  w.u8(static_cast<std::uint8_t>(m.act_h));
  w.u8(static_cast<std::uint8_t>(loss.kind));
  w.f64(loss.hybrid_weight);
}

template <class Params>
void write_blocks(detail::ByteWriter& w, const Params& p) {
  p.for_each_block([&](std::string_view, std::span<const double> block) { w.f64s(block); });
}

template <class Params>
void read_blocks(detail::ByteReader& r, Params& p) {
  p.for_each_block([&](std::string_view name, std::span<double> block) { r.f64s(block, name); });
}

std::pair<GatedModel, LossMode> read_gated(detail::ByteReader& r) {
  GatedShape shape;
  shape.n_x = r.u32("n_x");
  shape.n_y = r.u32("n_y");
  shape.n_h = r.u32("n_h");
  shape.n_f = r.u32("n_f");
  if (shape.n_x == 0 || shape.n_y == 0 || shape.n_h == 0 || shape.n_f == 0) {
    r.fail("layer sizes must be positive");
  }
  const std::uint8_t tying = r.u8("tying");
  if (tying > 1) r.fail("unknown tying code " + std::to_string(tying));
  ActivationKind acts[3];
  for (auto& a : acts) {
    const std::uint8_t code = r.u8("activation");
    if (code > static_cast<std::uint8_t>(ActivationKind::Softmax)) {
      r.fail("unknown activation code " + std::to_string(code));
    }
    a = static_cast<ActivationKind>(code);
  }
  const std::uint8_t loss_code = r.u8("loss kind");
  if (loss_code > static_cast<std::uint8_t>(LossMode::Kind::Hybrid)) {
    r.fail("unknown loss code " + std::to_string(loss_code));
  }
  LossMode loss{static_cast<LossMode::Kind>(loss_code), r.f64("hybrid weight")};
  GatedModel m = GatedModel::zeros(shape, static_cast<TyingMode>(tying), acts[0], acts[1], acts[2]);
  read_blocks(r, m.params);
  return {std::move(m), loss};
}

}  // namespace

std::string encode_model(const ModelFile& file) {
  detail::ByteWriter w;
  w.bytes(kMagic);
  w.u8(kVersion);
  if (const auto* gae = std::get_if<GaeFile>(&file)) {
    gae->model.validate();
    w.u8(static_cast<std::uint8_t>(Kind::Gae));
    w.u8(kGaussianMethodPolar);
    write_gated_descriptor(w, gae->model, gae->loss);
    write_blocks(w, gae->model.params);
  } else if (const auto* cl = std::get_if<ClusteringFile>(&file)) {
    cl->model.validate();
    w.u8(static_cast<std::uint8_t>(Kind::Clustering));
    w.u8(kGaussianMethodPolar);
    write_gated_descriptor(w, cl->model.gated, cl->loss);
    write_blocks(w, cl->model.gated.params);
    w.f64s(cl->model.w_ae.span());
    w.f64s(cl->model.b_ae.span());
  } else {
    const auto& m = std::get<MRnnModel>(file);
    m.validate();
    w.u8(static_cast<std::uint8_t>(Kind::MRnn));
    w.u8(kGaussianMethodPolar);
    w.u32(narrow(m.n_x));
    w.u32(narrow(m.n_h));
    w.u32(narrow(m.n_f));
    write_blocks(w, m);
  }
  return w.take();
}

ModelFile decode_model(const std::string& bytes) {
  detail::ByteReader r(bytes, "GNM1");
  if (r.bytes(4, "magic") != kMagic) throw FormatError("GNM1: bad magic, expected \"GNM1\" (at byte offset 0)");
  const std::uint8_t version = r.u8("version");
  if (version != kVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint8_t kind = r.u8("model kind");
  const std::uint8_t gaussian = r.u8("gaussian method");
  if (gaussian != kGaussianMethodPolar) r.fail("unknown gaussian method " + std::to_string(gaussian));

  auto read_body = [&]() -> ModelFile {
  switch (static_cast<Kind>(kind)) {
    case Kind::Gae: {
      auto [m, loss] = read_gated(r);
      return GaeFile{std::move(m), loss};
    }
    case Kind::Clustering: {
      auto [m, loss] = read_gated(r);
      Matrix w_ae(m.shape.n_y, m.shape.n_x);
      Vector b_ae(m.shape.n_y);
      r.f64s(w_ae.span(), "W_AE");
      r.f64s(b_ae.span(), "b_AE");
      return ClusteringFile{ClusteringModel{std::move(m), std::move(w_ae), std::move(b_ae)}, loss};
    }
    case Kind::MRnn: {
      const std::size_t n_x = r.u32("n_x");
      const std::size_t n_h = r.u32("n_h");
      const std::size_t n_f = r.u32("n_f");
      if (n_x == 0 || n_h == 0 || n_f == 0) r.fail("mRNN sizes must be positive");
      MRnnModel m = MRnnModel::zeros(n_x, n_h, n_f);
      read_blocks(r, m);
      return m;
    }
    default:
      r.fail("unknown model kind " + std::to_string(kind));
  }
  };
  ModelFile out = read_body();
  if (!r.at_end()) r.fail("trailing bytes after parameter blocks");
  return out;
}

void save_model(const std::filesystem::path& path, const ModelFile& file) {
  detail::write_file(path, encode_model(file));
}

ModelFile load_model(const std::filesystem::path& path) {
  return decode_model(detail::read_file(path));
}

}  // namespace gated
