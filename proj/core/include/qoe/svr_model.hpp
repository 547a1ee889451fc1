#pragma once

#include <array>
#include <istream>
#include <optional>
#include <vector>

#include "qoe/brisque.hpp"

namespace qoe::iqa {

using FeatureVector = std::array<double, kFeatureCount>;

// Linear map from the regressor's scaled output interval to the reported score.
struct ScoreMapping {
  double scaled_lower = -1.0;
  double scaled_upper = 1.0;
  double score_min = 0.0;
  double score_max = 100.0;
};

// Pretrained epsilon-SVR with an RBF kernel plus its per-feature scaling
// bounds. Immutable after load_model; safe to share across threads.
struct SvrModel {
  double kernel_gamma = 0.0;
  double rho = 0.0;
  std::vector<FeatureVector> support_vectors;
  std::vector<double> dual_coefficients;

  double scaled_lower = -1.0;
  double scaled_upper = 1.0;
  FeatureVector feature_lower{};
  FeatureVector feature_upper{};

  // Absent means the raw decision value is the score.
  std::optional<ScoreMapping> score_range;
};

// Parses the plain-text libsvm model and svm-scale range formats. Support
// vectors are sparse `index:value` lists (1-based, strictly increasing,
// omitted entries are zero). Throws ParseError with the offending line.
SvrModel load_model(std::istream& model_text, std::istream& range_text);

// Per-feature scaling into [scaled_lower, scaled_upper].
FeatureVector scale_features(const BrisqueFeatures& features, const SvrModel& model);

// sum_j dual_j * exp(-gamma * |x - sv_j|^2) - rho on scaled features,
// then mapped through score_range when present.
double score(const BrisqueFeatures& features, const SvrModel& model);

}  // namespace qoe::iqa
