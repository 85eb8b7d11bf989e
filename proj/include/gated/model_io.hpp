#pragma once
// "GNM1" model files, little-endian throughout:
//
//   bytes 0..3  magic "GNM1"
//   u8          format version (1)
//   u8          model kind: 0 gated autoencoder, 1 clustering, 2 mRNN
//   u8          Gaussian draw method used for initialization (1 = polar)
//   gated / clustering descriptor:
//     u32 n_x, n_y, n_h, n_f
//     u8  tying (0 tied, 1 untied)
//     u8  act_x, act_y, act_h (ActivationKind codes)
//     u8  loss kind (LossMode::Kind code), f64 hybrid weight
//   mRNN descriptor:
//     u32 n_x, n_h, n_f
//   f64 parameter blocks in order:
//     gated:      W_x_in, W_y_in, W_h_in, [W_x_out, W_y_out, W_h_out],
//                 b_fx, b_fy, b_fh, b_x, b_y, b_h
//     clustering: the gated blocks, then W_AE, b_AE
//     mRNN:       W_fx, W_fh, W_hf, W_hx, W_out, b_y, h0

#include <filesystem>
#include <string>
#include <variant>

#include "gated/gated_model.hpp"
#include "gated/mrnn.hpp"
#include "gated/training.hpp"
#include "gated/variants.hpp"

namespace gated {

struct GaeFile {
  GatedModel model;
  LossMode loss;

  friend bool operator==(const GaeFile&, const GaeFile&) = default;
};

struct ClusteringFile {
  ClusteringModel model;
  LossMode loss;

  friend bool operator==(const ClusteringFile&, const ClusteringFile&) = default;
};

using ModelFile = std::variant<GaeFile, ClusteringFile, MRnnModel>;

std::string encode_model(const ModelFile& file);
ModelFile decode_model(const std::string& bytes);

void save_model(const std::filesystem::path& path, const ModelFile& file);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace gated
