#include "qoe/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>

#include "qoe/error.hpp"
#include "qoe/regression.hpp"

namespace qoe::synth {

const std::array<std::array<double, 6>, 6> kTableBrisque{{
    {27.602, 34.082, 33.384, 35.943, 49.366, 80.646},
    {11.325, 31.327, 41.784, 51.389, 57.931, 90.495},
    {8.643, 15.609, 27.429, 46.592, 61.083, 86.582},
    {10.107, 15.020, 22.109, 33.902, 43.216, 65.843},
    {11.632, 31.747, 32.648, 34.323, 46.320, 86.237},
    {3.402, 23.422, 25.361, 32.967, 52.790, 85.074},
}};

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Box-Muller; spelled out so streams do not depend on the library's distributions.
  double gaussian() {
    if (cached_) {
      cached_ = false;
      return spare_;
    }
    double u = 0.0;
    while (u == 0.0) u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    spare_ = r * std::sin(2.0 * std::numbers::pi * v);
    cached_ = true;
    return r * std::cos(2.0 * std::numbers::pi * v);
  }

  std::size_t below(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
  bool cached_ = false;
  double spare_ = 0.0;
};

const char* to_string(BrisqueMode m) { return m == BrisqueMode::table ? "table" : "aligned"; }
const char* to_string(RatingRule r) { return r == RatingRule::class_map ? "class_map" : "linear_of_brisque"; }
const char* to_string(Encoding e) { return e == Encoding::level ? "level" : "rating"; }

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& where) {
  const std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [key, value] : j.items())
    if (!known.count(key)) throw RangeError("unknown key '" + key + "' in " + where);
}

template <class T, std::size_t N>
std::array<T, N> fixed_array(const nlohmann::json& j, const char* key, const std::array<T, N>& fallback) {
  if (!j.contains(key)) return fallback;
  const auto v = j.at(key).get<std::vector<T>>();
  if (v.size() != N) throw RangeError(std::string(key) + " needs " + std::to_string(N) + " values");
  std::array<T, N> out{};
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

double aligned_brisque(const SynthConfig& c, int image, int level) {
  const int r = std::clamp(5 - level + image % 2, session::kMinRating, session::kMaxRating);
  return (static_cast<double>(r) - c.intercept) / c.slope;
}

}  // namespace

void SynthConfig::validate() const {
  if (subjects < 1) throw RangeError("subjects must be positive");
  if (images < 1) throw RangeError("images must be positive");
  if (max_level < 0 || max_level > session::kMaxLevel) throw RangeError("max_level must lie in [0, 5]");
  if (brisque_mode == BrisqueMode::table && images > static_cast<int>(kTableImages.size()))
    throw RangeError("table BRISQUE mode covers at most 6 images");
  if (brisque_mode == BrisqueMode::aligned && slope == 0.0) throw RangeError("aligned BRISQUE mode needs a nonzero slope");
  if (!(noise_sigma >= 0.0)) throw RangeError("noise_sigma must be non-negative");
  if (!(event_spacing_ms > session::kFeatureWindowMs)) throw RangeError("event_spacing_ms must exceed the 500 ms window");
  if (first_event_ms < 0.0) throw RangeError("first_event_ms must be non-negative");
  if (eeg.enabled) {
    if (!(eeg.sample_interval_ms > 0.0)) throw RangeError("sample_interval_ms must be positive");
    if (!(eeg.dropout >= 0.0 && eeg.dropout < 1.0)) throw RangeError("dropout must lie in [0, 1)");
    if (eeg.jitter < 0.0 || eeg.background_sigma < 0.0) throw RangeError("noise sigmas must be non-negative");
    const std::size_t needed = eeg.encode == Encoding::rating ? session::kMaxRating
                                                               : static_cast<std::size_t>(max_level + 1);
    if (eeg.amplitudes.size() < needed)
      throw RangeError("eeg amplitudes need " + std::to_string(needed) + " entries");
  }
}

SynthConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw RangeError("synth config must be a JSON object");
  reject_unknown(j,
                 {"subjects", "images", "max_level", "brisque_mode", "rating_rule", "eeg_rule", "first_event_ms",
                  "event_spacing_ms", "seed"},
                 "synth config");
  SynthConfig c;
  try {
    c.subjects = j.value("subjects", c.subjects);
    c.images = j.value("images", c.images);
    c.max_level = j.value("max_level", c.max_level);
    c.first_event_ms = j.value("first_event_ms", c.first_event_ms);
    c.event_spacing_ms = j.value("event_spacing_ms", c.event_spacing_ms);
    c.seed = j.value("seed", c.seed);

    const auto mode = j.value("brisque_mode", std::string("table"));
    if (mode == "table") c.brisque_mode = BrisqueMode::table;
    else if (mode == "aligned") c.brisque_mode = BrisqueMode::aligned;
    else throw RangeError("brisque_mode must be 'table' or 'aligned'");

    if (j.contains("rating_rule")) {
      const auto& r = j.at("rating_rule");
      reject_unknown(r, {"kind", "intercept", "slope", "noise_sigma"}, "rating_rule");
      const auto kind = r.value("kind", std::string("linear_of_brisque"));
      if (kind == "linear_of_brisque") c.rating_rule = RatingRule::linear_of_brisque;
      else if (kind == "class_map") c.rating_rule = RatingRule::class_map;
      else throw RangeError("rating_rule.kind must be 'linear_of_brisque' or 'class_map'");
      c.intercept = r.value("intercept", c.intercept);
      c.slope = r.value("slope", c.slope);
      c.noise_sigma = r.value("noise_sigma", c.noise_sigma);
    }

    if (j.contains("eeg_rule")) {
      const auto& e = j.at("eeg_rule");
      reject_unknown(e,
                     {"enabled", "band_base", "position_gain", "amplitudes", "encode", "jitter", "background_sigma",
                      "dropout", "sample_interval_ms", "subject_scale_spread", "subject_offset_spread"},
                     "eeg_rule");
      auto& g = c.eeg;
      g.enabled = e.value("enabled", g.enabled);
      g.band_base = fixed_array(e, "band_base", g.band_base);
      g.position_gain = fixed_array(e, "position_gain", g.position_gain);
      if (e.contains("amplitudes")) g.amplitudes = e.at("amplitudes").get<std::vector<double>>();
      const auto enc = e.value("encode", std::string("rating"));
      if (enc == "rating") g.encode = Encoding::rating;
      else if (enc == "level") g.encode = Encoding::level;
      else throw RangeError("eeg_rule.encode must be 'rating' or 'level'");
      g.jitter = e.value("jitter", g.jitter);
      g.background_sigma = e.value("background_sigma", g.background_sigma);
      g.dropout = e.value("dropout", g.dropout);
      g.sample_interval_ms = e.value("sample_interval_ms", g.sample_interval_ms);
      g.subject_scale_spread = e.value("subject_scale_spread", g.subject_scale_spread);
      g.subject_offset_spread = e.value("subject_offset_spread", g.subject_offset_spread);
    }
  } catch (const nlohmann::json::exception& ex) {
    throw RangeError(std::string("synth config: ") + ex.what());
  }
  c.validate();
  return c;
}

nlohmann::ordered_json to_json(const SynthConfig& c) {
  return {{"subjects", c.subjects},
          {"images", c.images},
          {"max_level", c.max_level},
          {"brisque_mode", to_string(c.brisque_mode)},
          {"rating_rule",
           {{"kind", to_string(c.rating_rule)},
            {"intercept", c.intercept},
            {"slope", c.slope},
            {"noise_sigma", c.noise_sigma}}},
          {"eeg_rule",
           {{"enabled", c.eeg.enabled},
            {"band_base", c.eeg.band_base},
            {"position_gain", c.eeg.position_gain},
            {"amplitudes", c.eeg.amplitudes},
            {"encode", to_string(c.eeg.encode)},
            {"jitter", c.eeg.jitter},
            {"background_sigma", c.eeg.background_sigma},
            {"dropout", c.eeg.dropout},
            {"sample_interval_ms", c.eeg.sample_interval_ms},
            {"subject_scale_spread", c.eeg.subject_scale_spread},
            {"subject_offset_spread", c.eeg.subject_offset_spread}}},
          {"first_event_ms", c.first_event_ms},
          {"event_spacing_ms", c.event_spacing_ms},
          {"seed", c.seed}};
}

std::string subject_name(int index) {
  const std::string n = std::to_string(index + 1);
  return "s" + std::string(n.size() < 2 ? 2 - n.size() : 0, '0') + n;
}

std::string image_name(int index) {
  if (index < static_cast<int>(kTableImages.size())) return kTableImages[static_cast<std::size_t>(index)];
  const std::string n = std::to_string(index + 1);
  return "img" + std::string(n.size() < 2 ? 2 - n.size() : 0, '0') + n;
}

SynthData generate(const SynthConfig& config) {
  config.validate();
  SynthData data;

  for (int i = 0; i < config.images; ++i)
    for (int l = 0; l <= config.max_level; ++l) {
      const double b = config.brisque_mode == BrisqueMode::table
                           ? kTableBrisque[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)]
                           : aligned_brisque(config, i, l);
      data.brisque.emplace(session::MediaKey{image_name(i), l}, b);
    }

  const auto& eeg = config.eeg;
  for (int s = 0; s < config.subjects; ++s) {
    Rng rng(config.seed ^ (0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s + 1)));
    session::SubjectSession sess;
    sess.subject_id = subject_name(s);

    std::vector<session::MediaKey> order;
    for (const auto& [key, b] : data.brisque) order.push_back(key);
    for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);

    std::vector<double> amplitude;
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& key = order[k];
      const double t = config.first_event_ms + static_cast<double>(k) * config.event_spacing_ms;
      sess.events.push_back({key.image_id, key.level, t, session::kDefaultDisplayMs});

      double raw = 0.0;
      if (config.rating_rule == RatingRule::class_map) {
        raw = 6.0 - key.level;
      } else {
        raw = config.intercept + config.slope * data.brisque.at(key);
        if (config.noise_sigma > 0.0) raw += config.noise_sigma * rng.gaussian();
      }
      const int q = regression::bound(raw);
      sess.ratings.push_back({sess.subject_id, key.image_id, key.level, q});
      const std::size_t idx = eeg.encode == Encoding::rating ? static_cast<std::size_t>(q - 1)
                                                              : static_cast<std::size_t>(key.level);
      amplitude.push_back(eeg.amplitudes[idx]);
    }

    if (eeg.enabled) {
      const double scale = 1.0 + eeg.subject_scale_spread * (2.0 * rng.uniform() - 1.0);
      std::array<double, session::kChannelCount> offset{};
      for (auto& o : offset) o = eeg.subject_offset_spread * (2.0 * rng.uniform() - 1.0);

      const double t_end = sess.events.back().t_start_ms + session::kDefaultDisplayMs + config.first_event_ms;
      std::size_t next_event = 0;
      for (std::size_t n = 0;; ++n) {
        const double t = static_cast<double>(n) * eeg.sample_interval_ms;
        if (t > t_end) break;
        while (next_event < sess.events.size() &&
               sess.events[next_event].t_start_ms + session::kFeatureWindowMs < t)
          ++next_event;
        const bool in_window = next_event < sess.events.size() && sess.events[next_event].t_start_ms <= t;

        session::EegSample sample{t, {}};
        for (std::size_t c = 0; c < session::kChannelCount; ++c) {
          const double gain = eeg.position_gain[c % session::kPositionCount];
          double v = eeg.band_base[c / session::kPositionCount] * gain;
          if (in_window) {
            v += amplitude[next_event] * gain;
            if (eeg.jitter > 0.0) v += eeg.jitter * rng.gaussian();
          } else if (eeg.background_sigma > 0.0) {
            v += eeg.background_sigma * rng.gaussian();
          }
          const bool absent = eeg.dropout > 0.0 && rng.uniform() < eeg.dropout;
          if (!absent) sample.bands[c] = scale * v + offset[c];
        }
        sess.trace.push_back(sample);
      }
    }
    data.sessions.push_back(std::move(sess));
  }
  return data;
}

void write(const SynthData& data, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const auto open = [](const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
  };
  fs::create_directories(dir);
  {
    auto out = open(dir / "ratings.csv");
    session::write_ratings(out, data.sessions);
  }
  {
    auto out = open(dir / "brisque.csv");
    session::write_brisque_table(out, data.brisque);
  }
  if (std::any_of(data.sessions.begin(), data.sessions.end(), [](const auto& s) { return !s.trace.empty(); })) {
    fs::create_directories(dir / "eeg");
    for (const auto& s : data.sessions) {
      auto out = open(dir / "eeg" / (s.subject_id + ".csv"));
      session::write_eeg(out, s.trace);
    }
  }
}

}  // namespace qoe::synth
