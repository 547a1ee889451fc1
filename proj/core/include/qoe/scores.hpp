#pragma once

// Opinion scores and the agreement/error statistics used to compare
// ratings, objective metrics, and predictions.

#include <cstddef>
#include <map>
#include <optional>
#include <span>

#include "qoe/session.hpp"

namespace qoe::scores {

struct MosEntry {
  double mos = 0.0;
  std::size_t count = 0;
};

// Keyed by (image, level); level-0 (reference) groups are included.
using MosTable = std::map<session::MediaKey, MosEntry>;

struct DmosEntry {
  double dmos = 0.0;
  std::size_t count = 0;
};

// Keyed by (image, level) for levels >= 1.
using DmosTable = std::map<session::MediaKey, DmosEntry>;

MosTable mos(std::span<const session::Rating> ratings);

// Crushed differential score of one rating against the same subject's
// hidden-reference rating: d = q - q_ref + 5, returned as is when d <= 5,
// otherwise 7d / (q - q_ref + 7). Throws RangeError outside {1..5}.
double dmos_single(int q, int q_ref);

// Averages dmos_single over subjects per (image, level >= 1). Throws
// ValidationError naming every (subject, image) without a level-0 rating.
DmosTable dmos(std::span<const session::Rating> ratings);

// Per-rating crushed scores for levels >= 1, aligned with the returned keys.
struct DifferentialRating {
  session::Rating rating;
  double crushed = 0.0;
};
std::vector<DifferentialRating> differential_ratings(std::span<const session::Rating> ratings);

// Sample Pearson product-moment correlation. Throws DimensionError on
// mismatched or too-short input, DegenerateError when a series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

struct FitMetrics {
  std::optional<double> r2;  // absent when y_true is constant
  double mse = 0.0;
  double mae = 0.0;
  double medae = 0.0;
};

// r2 = 1 - SS_res / SS_tot; medae takes the mean of the middle pair for
// even counts.
FitMetrics fit_metrics(std::span<const double> y_true, std::span<const double> y_pred);

// Coefficient of determination alone; throws DegenerateError for constant y_true.
double r2_score(std::span<const double> y_true, std::span<const double> y_pred);

double median(std::vector<double> values);

}  // namespace qoe::scores
