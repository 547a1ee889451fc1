#include "qoe/scores.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qoe/error.hpp"

namespace qoe::scores {

using session::MediaKey;
using session::Rating;

MosTable mos(std::span<const Rating> ratings) {
  std::map<MediaKey, double> sums;
  MosTable table;
  for (const auto& r : ratings) {
    const MediaKey key{r.image_id, r.level};
    sums[key] += r.q;
    ++table[key].count;
  }
  for (auto& [key, entry] : table) entry.mos = sums[key] / static_cast<double>(entry.count);
  return table;
}

double dmos_single(int q, int q_ref) {
  if (q < session::kMinRating || q > session::kMaxRating || q_ref < session::kMinRating ||
      q_ref > session::kMaxRating)
    throw RangeError("ratings must lie in [1, 5], got q=" + std::to_string(q) + ", q_ref=" + std::to_string(q_ref));
  const int d = q - q_ref + 5;
  if (d <= 5) return d;
  return 7.0 * d / static_cast<double>(q - q_ref + 7);
}

std::vector<DifferentialRating> differential_ratings(std::span<const Rating> ratings) {
  std::map<std::pair<std::string, std::string>, int> reference;
  for (const auto& r : ratings)
    if (r.level == 0) reference[{r.subject_id, r.image_id}] = r.q;

  std::vector<DifferentialRating> out;
  std::vector<std::string> missing;
  for (const auto& r : ratings) {
    if (r.level == 0) continue;
    const auto ref = reference.find({r.subject_id, r.image_id});
    if (ref == reference.end()) {
      const auto tag = "subject " + r.subject_id + " / image " + r.image_id;
      if (std::find(missing.begin(), missing.end(), tag) == missing.end()) missing.push_back(tag);
      continue;
    }
    out.push_back({r, dmos_single(r.q, ref->second)});
  }
  if (!missing.empty()) {
    std::string msg = "missing level-0 reference rating for:";
    for (const auto& m : missing) msg += " [" + m + "]";
    throw ValidationError(msg);
  }
  return out;
}

DmosTable dmos(std::span<const Rating> ratings) {
  DmosTable table;
  for (const auto& d : differential_ratings(ratings)) {
    auto& e = table[MediaKey{d.rating.image_id, d.rating.level}];
    e.dmos += d.crushed;
    ++e.count;
  }
  for (auto& [key, e] : table) e.dmos /= static_cast<double>(e.count);
  return table;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("pearson: series lengths differ");
  if (x.size() < 2) throw DimensionError("pearson: need at least 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double dx = x[k] - mx, dy = y[k] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DegenerateError("pearson: correlation undefined for a constant series");
  // The (n - 1) normalizations of covariance and variances cancel.
  const double r = sxy / std::sqrt(sxx * syy);
  return std::clamp(r, -1.0, 1.0);
}

double median(std::vector<double> values) {
  if (values.empty()) throw DimensionError("median of empty list");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

FitMetrics fit_metrics(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw DimensionError("fit_metrics: length mismatch");
  if (y_true.empty()) throw DimensionError("fit_metrics: empty input");
  const double n = static_cast<double>(y_true.size());

  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= n;

  double ss_res = 0.0, ss_tot = 0.0, abs_sum = 0.0;
  std::vector<double> abs_res(y_true.size());
  for (std::size_t k = 0; k < y_true.size(); ++k) {
    const double r = y_true[k] - y_pred[k];
    ss_res += r * r;
    abs_sum += std::abs(r);
    abs_res[k] = std::abs(r);
    const double c = y_true[k] - mean;
    ss_tot += c * c;
  }

  FitMetrics m;
  if (ss_tot > 0.0) m.r2 = 1.0 - ss_res / ss_tot;
  m.mse = ss_res / n;
  m.mae = abs_sum / n;
  m.medae = median(std::move(abs_res));
  return m;
}

double r2_score(std::span<const double> y_true, std::span<const double> y_pred) {
  const auto m = fit_metrics(y_true, y_pred);
  if (!m.r2) throw DegenerateError("r2 undefined: y_true is constant");
  return *m.r2;
}

}  // namespace qoe::scores
