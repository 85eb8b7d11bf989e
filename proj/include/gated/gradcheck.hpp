#pragma once
// Central finite-difference verification of the analytic gradients.

#include <cstdint>
#include <string>
#include <vector>

#include "gated/gated_model.hpp"
#include "gated/mrnn.hpp"
#include "gated/training.hpp"
#include "gated/variants.hpp"

namespace gated {

inline constexpr double kFiniteDifferenceStep = 1e-5;
inline constexpr double kGradientTolerance = 1e-5;

/// |a - n| / max(|a|, |n|, 1e-12) over the concatenated gradient vectors.
double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric);

struct GradCheck {
  std::vector<double> analytic;
  std::vector<double> numeric;
  double rel_error = 0.0;
};

GradCheck check_gae_gradient(const GatedModel& model, const Vector& x, const Vector& y,
                             const LossMode& mode, const EncoderInputs& inputs,
                             const Vector* label = nullptr, double eps = kFiniteDifferenceStep);

GradCheck check_clustering_gradient(const ClusteringModel& model, const Vector& x,
                                    const Vector& x_enc, double eps = kFiniteDifferenceStep);

GradCheck check_mrnn_gradient(const MRnnModel& model, const SequencePair& seq,
                              MRnnLoss kind = MRnnLoss::Squared, double eps = kFiniteDifferenceStep);

struct GridEntry {
  std::string name;
  double rel_error = 0.0;
};

struct GridReport {
  std::vector<GridEntry> entries;
  double max_rel_error() const;
  std::size_t failures(double tolerance = kGradientTolerance) const;
};

/// Random models with sizes <= 4 (weights and biases drawn so that every path
/// carries signal) over the loss x tying x activation grid, `seeds` seeds each,
/// plus the clustering joint gradient and mRNN BPTT on length-3 sequences.
GridReport run_gradcheck_grid(std::size_t seeds, std::uint64_t base_seed = 1);

}  // namespace gated
