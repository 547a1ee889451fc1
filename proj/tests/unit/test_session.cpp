#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>

#include "qoe/error.hpp"
#include "qoe/session.hpp"

using namespace qoe;
using namespace qoe::session;

namespace {

const char* kRatingsHeader = "subject_id,image_id,level,rating,t_start_ms\n";

std::string eeg_header() {
  std::string h = "t_ms";
  for (std::size_t c = 0; c < kChannelCount; ++c) h += "," + channel_name(c);
  return h + "\n";
}

std::string eeg_row(double t, double value, int skip = -1) {
  std::ostringstream s;
  s << t;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    s << ',';
    if (static_cast<int>(c) != skip) s << value + static_cast<double>(c);
  }
  return s.str() + "\n";
}

SubjectSession complete_session() {
  SubjectSession s{"7", {}, {}, {}};
  for (int l = 0; l < 3; ++l) {
    s.events.push_back({"garden", l, 1000.0 + 20000.0 * l, kDefaultDisplayMs});
    s.ratings.push_back({"7", "garden", l, 5 - l});
  }
  for (int k = 0; k <= 500; ++k) {
    EegSample e{100.0 * k, {}};
    for (std::size_t c = 0; c < kChannelCount; ++c) e.bands[c] = 1.0 + static_cast<double>(c) + 0.01 * k;
    s.trace.push_back(e);
  }
  return s;
}

}  // namespace

TEST(Channels, NamesAndIndices) {
  EXPECT_EQ(channel_name(0), "low_TP9");
  EXPECT_EQ(channel_name(1), "low_Fp1");
  EXPECT_EQ(channel_name(23), "gamma_TP10");
  EXPECT_EQ(channel_index("alpha_TP9"), 12u);
  EXPECT_FALSE(channel_index("alpha_Cz").has_value());
}

TEST(IngestRatings, ParsesRow) {
  std::istringstream in(std::string(kRatingsHeader) + "16,garden,0,5,1000\n");
  const auto sessions = ingest_ratings(in);
  ASSERT_EQ(sessions.size(), 1u);
  ASSERT_EQ(sessions[0].ratings.size(), 1u);
  EXPECT_EQ(sessions[0].ratings[0], (Rating{"16", "garden", 0, 5}));
  EXPECT_EQ(sessions[0].events[0].t_start_ms, 1000.0);
  EXPECT_EQ(sessions[0].events[0].duration_ms, 15000.0);
}

TEST(IngestRatings, RatingOutOfRange) {
  std::istringstream in(std::string(kRatingsHeader) + "16,garden,0,6,1000\n");
  try {
    ingest_ratings(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(IngestRatings, LevelOutOfRange) {
  std::istringstream in(std::string(kRatingsHeader) + "16,garden,6,3,1000\n");
  EXPECT_THROW(ingest_ratings(in), ParseError);
}

TEST(IngestRatings, Duplicate) {
  std::istringstream in(std::string(kRatingsHeader) + "16,garden,0,5,1000\n16,garden,0,4,2000\n");
  try {
    ingest_ratings(in);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("duplicate"), std::string::npos);
  }
}

TEST(IngestRatings, EmptyRatingIsUnratedEvent) {
  std::istringstream in(std::string(kRatingsHeader) + "16,garden,0,,1000\n16,garden,1,4,21000\n");
  const auto s = ingest_ratings(in);
  EXPECT_EQ(s[0].events.size(), 2u);
  EXPECT_EQ(s[0].ratings.size(), 1u);
}

TEST(IngestRatings, EmptyInputAndBadHeader) {
  std::istringstream empty("");
  EXPECT_THROW(ingest_ratings(empty), ParseError);
  std::istringstream bad("subject,image,level,rating\n");
  EXPECT_THROW(ingest_ratings(bad), ParseError);
}

TEST(IngestRatings, SubjectsInFirstAppearanceOrder) {
  std::istringstream in(std::string(kRatingsHeader) + "b,x,0,5,0\na,x,0,5,0\nb,x,1,4,100\n");
  const auto s = ingest_ratings(in);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].subject_id, "b");
  EXPECT_EQ(s[0].events.size(), 2u);
  EXPECT_EQ(s[1].subject_id, "a");
}

TEST(IngestEeg, AllPresent) {
  std::istringstream in(eeg_header() + eeg_row(0, 1.5));
  const auto trace = ingest_eeg(in);
  ASSERT_EQ(trace.size(), 1u);
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    ASSERT_TRUE(trace[0].bands[c].has_value());
    EXPECT_DOUBLE_EQ(*trace[0].bands[c], 1.5 + static_cast<double>(c));
  }
}

TEST(IngestEeg, EmptyCellIsAbsent) {
  const int gamma_tp10 = static_cast<int>(*channel_index("gamma_TP10"));
  std::istringstream in(eeg_header() + eeg_row(0, 2.0, gamma_tp10));
  const auto trace = ingest_eeg(in);
  EXPECT_FALSE(trace[0].bands[static_cast<std::size_t>(gamma_tp10)].has_value());
  EXPECT_EQ(std::count_if(trace[0].bands.begin(), trace[0].bands.end(), [](const auto& v) { return v.has_value(); }),
            23);
}

TEST(IngestEeg, NonMonotoneTimestamps) {
  std::istringstream in(eeg_header() + eeg_row(100, 1) + eeg_row(90, 1));
  EXPECT_THROW(ingest_eeg(in), ParseError);
}

TEST(IngestEeg, NonNumericCell) {
  std::string row = eeg_row(0, 1);
  row.replace(row.find(','), 2, ",x");
  std::istringstream in(eeg_header() + row);
  EXPECT_THROW(ingest_eeg(in), ParseError);
}

TEST(IngestEeg, ColumnsInAnyOrder) {
  std::string header = "t_ms";
  std::string row = "0";
  for (std::size_t c = kChannelCount; c-- > 0;) {
    header += "," + channel_name(c);
    row += "," + std::to_string(c);
  }
  std::istringstream in(header + "\n" + row + "\n");
  const auto trace = ingest_eeg(in);
  for (std::size_t c = 0; c < kChannelCount; ++c) EXPECT_DOUBLE_EQ(*trace[0].bands[c], static_cast<double>(c));
}

TEST(IngestBrisque, TableValues) {
  std::ifstream in(std::string(QOE_FIXTURE_DIR) + "/brisque_reference.csv");
  const auto t = ingest_brisque_table(in);
  EXPECT_EQ(t.size(), 36u);
  EXPECT_DOUBLE_EQ(t.at({"garden", 0}), 27.602);
  EXPECT_DOUBLE_EQ(t.at({"ocean", 5}), 65.843);
  EXPECT_DOUBLE_EQ(t.at({"beachhouse", 0}), 3.402);
}

TEST(IngestBrisque, Duplicate) {
  std::istringstream in("image_id,level,brisque\ngarden,0,1\ngarden,0,2\n");
  EXPECT_THROW(ingest_brisque_table(in), ParseError);
}

TEST(RoundTrip, RatingsEegBrisque) {
  const auto s = complete_session();
  std::ostringstream r1, e1, b1;
  write_ratings(r1, {s});
  write_eeg(e1, s.trace);
  BrisqueTable table{{{"garden", 0}, 27.602}, {{"garden", 1}, 1.0 / 3.0}};
  write_brisque_table(b1, table);

  std::istringstream r_in(r1.str()), e_in(e1.str()), b_in(b1.str());
  const auto sessions = ingest_ratings(r_in);
  const auto trace = ingest_eeg(e_in);
  const auto t2 = ingest_brisque_table(b_in);
  ASSERT_EQ(sessions.size(), 1u);
  EXPECT_EQ(sessions[0].events, s.events);
  EXPECT_EQ(sessions[0].ratings, s.ratings);
  EXPECT_EQ(trace, s.trace);
  EXPECT_EQ(t2, table);

  std::ostringstream r2, e2, b2;
  write_ratings(r2, sessions);
  write_eeg(e2, trace);
  write_brisque_table(b2, t2);
  EXPECT_EQ(r1.str(), r2.str());
  EXPECT_EQ(e1.str(), e2.str());
  EXPECT_EQ(b1.str(), b2.str());
}

TEST(Validate, CompleteSessionIsClean) {
  EXPECT_TRUE(validate_session(complete_session()).empty());
}

TEST(Validate, EventBeyondTraceEnd) {
  auto s = complete_session();
  s.events.push_back({"garden", 3, s.t_end() + 1000.0, kDefaultDisplayMs});
  s.ratings.push_back({"7", "garden", 3, 2});
  const auto report = validate_session(s);
  ASSERT_EQ(report.findings.size(), 1u);
  EXPECT_EQ(to_string(report.findings[0].kind), "empty window");
}

TEST(Validate, MissingChannel) {
  auto s = complete_session();
  const auto fp1 = *channel_index("alpha_Fp1");
  for (auto& e : s.trace) e.bands[fp1].reset();
  const auto report = validate_session(s);
  ASSERT_EQ(report.findings.size(), 1u);
  EXPECT_EQ(to_string(report.findings[0].kind), "channel entirely missing");
  EXPECT_NE(report.findings[0].detail.find("alpha_Fp1"), std::string::npos);
}

TEST(Validate, UnratedAndOrphan) {
  auto s = complete_session();
  s.ratings.erase(s.ratings.begin());
  s.ratings.push_back({"7", "ocean", 1, 3});
  const auto report = validate_session(s);
  ASSERT_EQ(report.findings.size(), 2u);
  EXPECT_EQ(report.findings[0].kind, FindingKind::unrated_event);
  EXPECT_EQ(report.findings[1].kind, FindingKind::orphan_rating);
}

TEST(SessionShape, PresentCountsAndEnd) {
  auto s = complete_session();
  s.trace[3].bands[5].reset();
  const auto counts = s.present_counts();
  EXPECT_EQ(counts[5], s.trace.size() - 1);
  EXPECT_EQ(counts[4], s.trace.size());
  EXPECT_DOUBLE_EQ(s.t_end(), 50000.0);
}
