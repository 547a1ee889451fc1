#pragma once

// Per-display-event EEG features: mean band power over the 500 ms after the
// stimulus, optionally after z-scoring each channel over the whole session.

#include <array>
#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qoe/session.hpp"

namespace qoe::eeg {

using session::kChannelCount;

struct ChannelStats {
  double mean = 0.0;
  double sigma = 0.0;  // population standard deviation
  std::size_t count = 0;
};

using SessionStats = std::array<ChannelStats, kChannelCount>;

struct WindowValues {
  session::ChannelValues values{};  // absent where no reading fell in the window
  std::array<std::size_t, kChannelCount> present_counts{};
};

// Mean of the present readings with t in [t_start, t_start + window_ms].
WindowValues window_average(std::span<const session::EegSample> trace, double t_start_ms,
                            double window_ms = session::kFeatureWindowMs);

// Whole-session mean, population sigma, and present count per channel.
// Throws DegenerateError if any channel has fewer than 2 readings or sigma 0.
SessionStats session_stats(std::span<const session::EegSample> trace);

// (x - mean) / sigma per present reading; absent readings stay absent.
std::vector<session::EegSample> zscore(std::span<const session::EegSample> trace, const SessionStats& stats);

struct EventFeatures {
  std::string image_id;
  int level = 0;
  std::array<double, kChannelCount> values{};
  std::array<std::size_t, kChannelCount> present_counts{};
  bool normalized = false;
};

// One row per rated display event, all 24 channels present.
struct FeatureMatrix {
  std::string subject_id;
  bool normalized = false;
  std::vector<EventFeatures> rows;
  std::vector<int> rating;        // target q
  std::vector<int> level;         // target l
  std::vector<double> brisque;    // target B
  std::vector<session::MediaKey> dropped;  // events skipped for an absent channel
};

// Throws DegenerateError when normalized and a channel is degenerate, or when
// every row is dropped; ValidationError when a BRISQUE value is missing.
FeatureMatrix feature_matrix(const session::SubjectSession& s, bool normalized,
                             const session::BrisqueTable& brisque);

// `image_id,level,<24 channel columns>,q,l,brisque`
void write_feature_matrix(std::ostream& out, const FeatureMatrix& m);

}  // namespace qoe::eeg
