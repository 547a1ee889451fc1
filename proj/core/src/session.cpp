#include "qoe/session.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "qoe/error.hpp"
#include "qoe/text.hpp"

namespace qoe::session {

namespace {

std::string read_header(std::istream& in, std::size_t& line_no, const std::string& what) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(what + ": empty input, header row required", 1);
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

void expect_header(std::istream& in, std::size_t& line_no, const std::string& expected) {
  const auto header = read_header(in, line_no, "csv");
  if (header != expected) throw ParseError("expected header '" + expected + "', got '" + header + "'", line_no);
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

int parse_level(const std::string& cell, std::size_t line_no) {
  const auto level = text::parse_integer(cell, line_no);
  if (level < 0 || level > kMaxLevel)
    throw ParseError("level " + cell + " outside [0, " + std::to_string(kMaxLevel) + "]", line_no);
  return static_cast<int>(level);
}

}  // namespace

std::string channel_name(std::size_t channel) {
  return std::string(kBands.at(channel / kPositionCount)) + "_" + kPositions.at(channel % kPositionCount);
}

std::optional<std::size_t> channel_index(const std::string& name) {
  for (std::size_t c = 0; c < kChannelCount; ++c)
    if (channel_name(c) == name) return c;
  return std::nullopt;
}

std::array<std::size_t, kChannelCount> SubjectSession::present_counts() const {
  std::array<std::size_t, kChannelCount> counts{};
  for (const auto& s : trace)
    for (std::size_t c = 0; c < kChannelCount; ++c)
      if (s.bands[c]) ++counts[c];
  return counts;
}

std::vector<SubjectSession> ingest_ratings(std::istream& csv) {
  std::size_t line_no = 0;
  expect_header(csv, line_no, "subject_id,image_id,level,rating,t_start_ms");

  std::vector<SubjectSession> sessions;
  std::map<std::string, std::size_t> by_subject;
  std::set<std::tuple<std::string, std::string, int>> seen;

  for (std::string line; std::getline(csv, line);) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = text::split_csv(line);
    if (cells.size() != 5) throw ParseError("expected 5 columns, got " + std::to_string(cells.size()), line_no);
    const auto& subject = cells[0];
    const auto& image = cells[1];
    if (subject.empty() || image.empty()) throw ParseError("subject_id and image_id must be non-empty", line_no);
    const int level = parse_level(cells[2], line_no);
    const double t_start = text::parse_double(cells[4], line_no);
    if (t_start < 0.0) throw ParseError("t_start_ms must be non-negative", line_no);

    if (!seen.emplace(subject, image, level).second)
      throw ParseError("duplicate rating for (" + subject + ", " + image + ", " + cells[2] + ")", line_no);

    auto [it, inserted] = by_subject.try_emplace(subject, sessions.size());
    if (inserted) sessions.push_back(SubjectSession{subject, {}, {}, {}});
    auto& s = sessions[it->second];
    s.events.push_back(DisplayEvent{image, level, t_start, kDefaultDisplayMs});

    if (!cells[3].empty()) {
      const auto q = text::parse_integer(cells[3], line_no);
      if (q < kMinRating || q > kMaxRating) throw ParseError("rating " + cells[3] + " outside [1, 5]", line_no);
      s.ratings.push_back(Rating{subject, image, level, static_cast<int>(q)});
    }
  }
  return sessions;
}

std::vector<EegSample> ingest_eeg(std::istream& csv) {
  std::size_t line_no = 0;
  const auto header = text::split_csv(read_header(csv, line_no, "eeg csv"));
  if (header.size() != kChannelCount + 1 || header[0] != "t_ms")
    throw ParseError("eeg header must be t_ms followed by 24 <band>_<position> columns", line_no);

  std::array<std::size_t, kChannelCount> column_to_channel{};
  std::set<std::size_t> assigned;
  for (std::size_t k = 1; k < header.size(); ++k) {
    const auto ch = channel_index(header[k]);
    if (!ch) throw ParseError("unknown eeg column '" + header[k] + "'", line_no);
    if (!assigned.insert(*ch).second) throw ParseError("duplicate eeg column '" + header[k] + "'", line_no);
    column_to_channel[k - 1] = *ch;
  }

  std::vector<EegSample> trace;
  for (std::string line; std::getline(csv, line);) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = text::split_csv(line);
    if (cells.size() != kChannelCount + 1)
      throw ParseError("expected 25 columns, got " + std::to_string(cells.size()), line_no);
    EegSample s;
    s.t_ms = text::parse_double(cells[0], line_no);
    if (!trace.empty() && s.t_ms <= trace.back().t_ms)
      throw ParseError("timestamps must strictly increase (" + cells[0] + " after " +
                           text::format_double(trace.back().t_ms) + ")",
                       line_no);
    for (std::size_t k = 0; k < kChannelCount; ++k)
      s.bands[column_to_channel[k]] = text::parse_optional_double(cells[k + 1], line_no);
    trace.push_back(s);
  }
  return trace;
}

BrisqueTable ingest_brisque_table(std::istream& csv) {
  std::size_t line_no = 0;
  expect_header(csv, line_no, "image_id,level,brisque");
  BrisqueTable table;
  for (std::string line; std::getline(csv, line);) {
    ++line_no;
    if (blank(line)) continue;
    const auto cells = text::split_csv(line);
    if (cells.size() != 3) throw ParseError("expected 3 columns, got " + std::to_string(cells.size()), line_no);
    if (cells[0].empty()) throw ParseError("image_id must be non-empty", line_no);
    MediaKey key{cells[0], parse_level(cells[1], line_no)};
    if (!table.emplace(key, text::parse_double(cells[2], line_no)).second)
      throw ParseError("duplicate entry for (" + cells[0] + ", " + cells[1] + ")", line_no);
  }
  return table;
}

void write_ratings(std::ostream& out, const std::vector<SubjectSession>& sessions) {
  out << "subject_id,image_id,level,rating,t_start_ms\n";
  for (const auto& s : sessions) {
    for (const auto& e : s.events) {
      const auto r = std::find_if(s.ratings.begin(), s.ratings.end(), [&](const Rating& x) {
        return x.image_id == e.image_id && x.level == e.level;
      });
      out << s.subject_id << ',' << e.image_id << ',' << e.level << ',';
      if (r != s.ratings.end()) out << r->q;
      out << ',' << text::format_double(e.t_start_ms) << '\n';
    }
  }
}

void write_eeg(std::ostream& out, const std::vector<EegSample>& trace) {
  out << "t_ms";
  for (std::size_t c = 0; c < kChannelCount; ++c) out << ',' << channel_name(c);
  out << '\n';
  for (const auto& s : trace) {
    out << text::format_double(s.t_ms);
    for (const auto& v : s.bands) {
      out << ',';
      if (v) out << text::format_double(*v);
    }
    out << '\n';
  }
}

void write_brisque_table(std::ostream& out, const BrisqueTable& table) {
  out << "image_id,level,brisque\n";
  for (const auto& [key, value] : table)
    out << key.image_id << ',' << key.level << ',' << text::format_double(value) << '\n';
}

ValidationReport validate_session(const SubjectSession& s) {
  ValidationReport report;
  const auto tag = [&](const std::string& image, int level) {
    return "subject " + s.subject_id + ", image " + image + ", level " + std::to_string(level);
  };

  for (const auto& e : s.events) {
    const bool rated = std::any_of(s.ratings.begin(), s.ratings.end(), [&](const Rating& r) {
      return r.image_id == e.image_id && r.level == e.level;
    });
    if (!rated) report.findings.push_back({FindingKind::unrated_event, tag(e.image_id, e.level)});

    const auto first = std::lower_bound(s.trace.begin(), s.trace.end(), e.t_start_ms,
                                        [](const EegSample& x, double t) { return x.t_ms < t; });
    if (first == s.trace.end() || first->t_ms > e.t_start_ms + kFeatureWindowMs)
      report.findings.push_back({FindingKind::empty_window, tag(e.image_id, e.level) + " at t=" +
                                                                text::format_double(e.t_start_ms) + " ms"});
  }

  for (const auto& r : s.ratings) {
    const auto matches = std::count_if(s.events.begin(), s.events.end(), [&](const DisplayEvent& e) {
      return r.image_id == e.image_id && r.level == e.level;
    });
    if (matches != 1) report.findings.push_back({FindingKind::orphan_rating, tag(r.image_id, r.level)});
  }

  const auto counts = s.present_counts();
  for (std::size_t c = 0; c < kChannelCount; ++c)
    if (counts[c] == 0)
      report.findings.push_back({FindingKind::channel_missing, "subject " + s.subject_id + ", " + channel_name(c)});
  return report;
}

std::string to_string(FindingKind kind) {
  switch (kind) {
    case FindingKind::unrated_event: return "event lacks rating";
    case FindingKind::orphan_rating: return "rating lacks event";
    case FindingKind::empty_window: return "empty window";
    case FindingKind::channel_missing: return "channel entirely missing";
  }
  return "unknown";
}

}  // namespace qoe::session
