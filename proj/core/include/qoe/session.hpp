#pragma once

// Experiment data model: who saw which image at which impairment level,
// when, how they rated it, and the EEG band powers recorded meanwhile.

#include <array>
#include <compare>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qoe::session {

inline constexpr int kMaxLevel = 5;
inline constexpr int kMinRating = 1;
inline constexpr int kMaxRating = 5;
inline constexpr double kDefaultDisplayMs = 15000.0;

inline constexpr std::size_t kPositionCount = 4;
inline constexpr std::size_t kBandCount = 6;
inline constexpr std::size_t kChannelCount = kPositionCount * kBandCount;

inline constexpr std::array<const char*, kPositionCount> kPositions{"TP9", "Fp1", "Fp2", "TP10"};
inline constexpr std::array<const char*, kBandCount> kBands{"low", "delta", "theta", "alpha", "beta", "gamma"};

// Channels are ordered band-major: low_TP9, low_Fp1, ..., gamma_TP10.
std::string channel_name(std::size_t channel);
std::optional<std::size_t> channel_index(const std::string& name);

struct MediaKey {
  std::string image_id;
  int level = 0;

  auto operator<=>(const MediaKey&) const = default;
};

struct MediaItem {
  std::string image_id;
  int level = 0;
  std::optional<double> brisque;
};

struct DisplayEvent {
  std::string image_id;
  int level = 0;
  double t_start_ms = 0.0;
  double duration_ms = kDefaultDisplayMs;

  bool operator==(const DisplayEvent&) const = default;
};

struct Rating {
  std::string subject_id;
  std::string image_id;
  int level = 0;
  int q = 0;

  bool operator==(const Rating&) const = default;
};

using ChannelValues = std::array<std::optional<double>, kChannelCount>;

struct EegSample {
  double t_ms = 0.0;
  ChannelValues bands{};

  bool operator==(const EegSample&) const = default;
};

struct SubjectSession {
  std::string subject_id;
  std::vector<DisplayEvent> events;
  std::vector<Rating> ratings;
  std::vector<EegSample> trace;

  // Last recording time T; 0 when no trace is attached.
  double t_end() const noexcept { return trace.empty() ? 0.0 : trace.back().t_ms; }
  // J per channel: number of present readings.
  std::array<std::size_t, kChannelCount> present_counts() const;
};

using BrisqueTable = std::map<MediaKey, double>;

// Header `subject_id,image_id,level,rating,t_start_ms`. One row per display
// event; an empty rating cell records an event that was shown but not rated.
// Sessions come back in order of first appearance.
std::vector<SubjectSession> ingest_ratings(std::istream& csv);

// Header `t_ms` plus the 24 `<band>_<position>` columns in any order.
// Empty cells are missing readings; timestamps must strictly increase.
std::vector<EegSample> ingest_eeg(std::istream& csv);

// Header `image_id,level,brisque`.
BrisqueTable ingest_brisque_table(std::istream& csv);

void write_ratings(std::ostream& out, const std::vector<SubjectSession>& sessions);
void write_eeg(std::ostream& out, const std::vector<EegSample>& trace);
void write_brisque_table(std::ostream& out, const BrisqueTable& table);

enum class FindingKind { unrated_event, orphan_rating, empty_window, channel_missing };

struct Finding {
  FindingKind kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool empty() const noexcept { return findings.empty(); }
};

inline constexpr double kFeatureWindowMs = 500.0;

// Report-only consistency check: events lacking ratings, ratings lacking
// events, events whose [t_start, t_start + 500 ms] window holds no sample,
// and channels with no present reading in the whole trace.
ValidationReport validate_session(const SubjectSession& s);

std::string to_string(FindingKind kind);

}  // namespace qoe::session
