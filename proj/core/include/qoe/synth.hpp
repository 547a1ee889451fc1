#pragma once

// Synthetic experiment generator: ratings, BRISQUE table and EEG traces
// with known ground truth, for closed-loop testing of the whole toolkit.

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qoe/session.hpp"

namespace qoe::synth {

// Reference BRISQUE values of six distorted-photograph ladders (levels 0..5).
inline constexpr std::array<const char*, 6> kTableImages{"garden", "bamboo", "mosque", "ocean", "golf", "beachhouse"};
extern const std::array<std::array<double, 6>, 6> kTableBrisque;

enum class BrisqueMode {
  table,    // the reference values above
  aligned,  // values placed so that the linear rating rule lands on integers
};

enum class RatingRule {
  linear_of_brisque,  // q = bound(intercept + slope * B + noise)
  class_map,          // q = bound(6 - level)
};

enum class Encoding { rating, level };

struct EegRule {
  bool enabled = true;
  std::array<double, session::kBandCount> band_base{4.0, 2.5, 1.8, 1.2, 0.9, 0.5};
  std::array<double, session::kPositionCount> position_gain{1.0, 0.8, 0.85, 1.1};
  // Added inside [t, t + 500 ms] of each event, indexed by rating - 1 or by level.
  std::vector<double> amplitudes{0.4, 0.8, 1.2, 1.6, 2.0, 2.4};
  Encoding encode = Encoding::rating;
  double jitter = 0.0;             // sigma of in-window noise
  double background_sigma = 0.25;  // sigma of out-of-window noise
  double dropout = 0.0;            // probability that a reading is absent
  double sample_interval_ms = 100.0;
  double subject_scale_spread = 0.3;  // per-subject gain drawn from 1 + U(-s, s)
  double subject_offset_spread = 1.0;
};

struct SynthConfig {
  int subjects = 15;
  int images = 6;
  int max_level = session::kMaxLevel;
  BrisqueMode brisque_mode = BrisqueMode::table;
  RatingRule rating_rule = RatingRule::linear_of_brisque;
  double intercept = 5.37;
  double slope = -0.049;
  double noise_sigma = 0.0;
  EegRule eeg;
  double first_event_ms = 1000.0;
  double event_spacing_ms = 20000.0;
  std::uint64_t seed = 1;

  // Throws RangeError for unusable settings.
  void validate() const;
};

SynthConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const SynthConfig& config);

struct SynthData {
  std::vector<session::SubjectSession> sessions;
  session::BrisqueTable brisque;
};

std::string subject_name(int index);  // s01, s02, ...
std::string image_name(int index);    // reference names first, then img07, ...

SynthData generate(const SynthConfig& config);

// Writes ratings.csv, brisque.csv and eeg/<subject>.csv under dir.
void write(const SynthData& data, const std::filesystem::path& dir);

}  // namespace qoe::synth
