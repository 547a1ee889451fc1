#include "qoe/eeg_features.hpp"

#include <algorithm>
#include <cmath>

#include "qoe/error.hpp"
#include "qoe/text.hpp"

namespace qoe::eeg {

using session::EegSample;

WindowValues window_average(std::span<const EegSample> trace, double t_start_ms, double window_ms) {
  WindowValues out;
  std::array<double, kChannelCount> sums{};
  const double t_stop = t_start_ms + window_ms;
  auto it = std::lower_bound(trace.begin(), trace.end(), t_start_ms,
                             [](const EegSample& s, double t) { return s.t_ms < t; });
  for (; it != trace.end() && it->t_ms <= t_stop; ++it) {
    for (std::size_t c = 0; c < kChannelCount; ++c) {
      if (!it->bands[c]) continue;
      sums[c] += *it->bands[c];
      ++out.present_counts[c];
    }
  }
  for (std::size_t c = 0; c < kChannelCount; ++c)
    if (out.present_counts[c] > 0) out.values[c] = sums[c] / static_cast<double>(out.present_counts[c]);
  return out;
}

SessionStats session_stats(std::span<const EegSample> trace) {
  SessionStats stats{};
  std::array<double, kChannelCount> sums{};
  for (const auto& s : trace)
    for (std::size_t c = 0; c < kChannelCount; ++c)
      if (s.bands[c]) {
        sums[c] += *s.bands[c];
        ++stats[c].count;
      }
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    if (stats[c].count < 2)
      throw DegenerateError("channel " + session::channel_name(c) + " has fewer than 2 readings");
    stats[c].mean = sums[c] / static_cast<double>(stats[c].count);
  }
  std::array<double, kChannelCount> sq{};
  for (const auto& s : trace)
    for (std::size_t c = 0; c < kChannelCount; ++c)
      if (s.bands[c]) {
        const double d = *s.bands[c] - stats[c].mean;
        sq[c] += d * d;
      }
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    stats[c].sigma = std::sqrt(sq[c] / static_cast<double>(stats[c].count));
    if (!(stats[c].sigma > 0.0))
      throw DegenerateError("channel " + session::channel_name(c) + " has zero variance");
  }
  return stats;
}

std::vector<EegSample> zscore(std::span<const EegSample> trace, const SessionStats& stats) {
  for (std::size_t c = 0; c < kChannelCount; ++c)
    if (!(stats[c].sigma > 0.0))
      throw DegenerateError("channel " + session::channel_name(c) + " has zero variance");
  std::vector<EegSample> out(trace.begin(), trace.end());
  for (auto& s : out)
    for (std::size_t c = 0; c < kChannelCount; ++c)
      if (s.bands[c]) s.bands[c] = (*s.bands[c] - stats[c].mean) / stats[c].sigma;
  return out;
}

FeatureMatrix feature_matrix(const session::SubjectSession& s, bool normalized,
                             const session::BrisqueTable& brisque) {
  FeatureMatrix m;
  m.subject_id = s.subject_id;
  m.normalized = normalized;

  std::vector<EegSample> z;
  std::span<const EegSample> trace = s.trace;
  if (normalized) {
    z = zscore(s.trace, session_stats(s.trace));
    trace = z;
  }

  for (const auto& e : s.events) {
    const auto r = std::find_if(s.ratings.begin(), s.ratings.end(), [&](const session::Rating& x) {
      return x.image_id == e.image_id && x.level == e.level;
    });
    if (r == s.ratings.end()) continue;
    const session::MediaKey key{e.image_id, e.level};
    const auto b = brisque.find(key);
    if (b == brisque.end())
      throw ValidationError("no BRISQUE value for image " + e.image_id + " level " + std::to_string(e.level));

    const auto w = window_average(trace, e.t_start_ms);
    if (std::any_of(w.values.begin(), w.values.end(), [](const auto& v) { return !v.has_value(); })) {
      m.dropped.push_back(key);
      continue;
    }
    EventFeatures row{e.image_id, e.level, {}, w.present_counts, normalized};
    for (std::size_t c = 0; c < kChannelCount; ++c) row.values[c] = *w.values[c];
    m.rows.push_back(std::move(row));
    m.rating.push_back(r->q);
    m.level.push_back(e.level);
    m.brisque.push_back(b->second);
  }
  if (m.rows.empty())
    throw DegenerateError("subject " + s.subject_id + ": no display event has readings on all channels");
  return m;
}

void write_feature_matrix(std::ostream& out, const FeatureMatrix& m) {
  out << "image_id,level";
  for (std::size_t c = 0; c < kChannelCount; ++c) out << ',' << session::channel_name(c);
  out << ",q,l,brisque\n";
  for (std::size_t k = 0; k < m.rows.size(); ++k) {
    const auto& r = m.rows[k];
    out << r.image_id << ',' << r.level;
    for (double v : r.values) out << ',' << text::format_double(v);
    out << ',' << m.rating[k] << ',' << m.level[k] << ',' << text::format_double(m.brisque[k]) << '\n';
  }
}

}  // namespace qoe::eeg
