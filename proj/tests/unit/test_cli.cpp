#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qoe/cli.hpp"
#include "qoe/text.hpp"

namespace fs = std::filesystem;
using namespace qoe;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "qoe");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) rows.push_back(text::split_csv(line));
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const std::string name = ::testing::UnitTest::GetInstance()->current_test_info()->name();
    dir_ = fs::temp_directory_path() / ("qoe_cli_" + name);
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& content) {
    const auto p = dir_ / name;
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

  // Ratings follow q = 6 - level (clamped) for three subjects on two images.
  fs::path class_map_ratings() {
    std::string s = "subject_id,image_id,level,rating,t_start_ms\n";
    int t = 0;
    for (const char* subj : {"a", "b", "c"})
      for (const char* img : {"x", "y"})
        for (int l = 0; l <= 5; ++l)
          s += std::string(subj) + "," + img + "," + std::to_string(l) + "," + std::to_string(std::min(5, 6 - l)) +
               "," + std::to_string(1000 + 20000 * t++) + "\n";
    return write("ratings.csv", s);
  }

  fs::path brisque_table() {
    std::string s = "image_id,level,brisque\n";
    for (const char* img : {"x", "y"})
      for (int l = 0; l <= 5; ++l)
        s += std::string(img) + "," + std::to_string(l) + "," + std::to_string(10 + 15 * l) + "\n";
    return write("brisque.csv", s);
  }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, NoSubcommandIsUsageError) {
  EXPECT_EQ(run({}).code, cli::kIoError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kIoError);
}

TEST_F(CliTest, ScoresWritesMosAndDmos) {
  const auto r = run({"scores", class_map_ratings().string(), "-o", dir_.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto rows = read_csv(dir_ / "mos_dmos.csv");
  ASSERT_EQ(rows.size(), 13u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"image_id", "level", "mos", "dmos", "count"}));
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const int level = std::stoi(rows[k][1]);
    EXPECT_DOUBLE_EQ(std::stod(rows[k][2]), std::min(5, 6 - level));
    EXPECT_EQ(rows[k][4], "3");
    if (level == 0) {
      EXPECT_EQ(rows[k][3], "");
    } else {
      // Reference rated 5: d = q; crushed only above 5, so DMOS equals MOS.
      EXPECT_DOUBLE_EQ(std::stod(rows[k][3]), std::min(5, 6 - level));
    }
  }
}

TEST_F(CliTest, ScoresMissingReferenceNamesSubjects) {
  const auto p = write("ratings.csv",
                       "subject_id,image_id,level,rating,t_start_ms\n"
                       "a,x,0,5,0\na,x,1,4,100\nb,x,1,3,0\nc,x,2,2,0\n");
  const auto r = run({"scores", p.string(), "-o", dir_.string()});
  EXPECT_EQ(r.code, cli::kInvalid);
  EXPECT_NE(r.err.find("subject b"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("subject c"), std::string::npos) << r.err;
}

TEST_F(CliTest, EmptyOrMissingFileIsIoExit) {
  const auto empty = write("empty.csv", "");
  EXPECT_EQ(run({"scores", empty.string()}).code, cli::kIoError);
  EXPECT_EQ(run({"scores", (dir_ / "absent.csv").string()}).code, cli::kIoError);
  const auto header_only = write("header.csv", "subject_id,image_id,level,rating,t_start_ms\n");
  EXPECT_EQ(run({"scores", header_only.string()}).code, cli::kIoError);
}

TEST_F(CliTest, MalformedRowCarriesLine) {
  const auto p = write("ratings.csv", "subject_id,image_id,level,rating,t_start_ms\na,x,0,5,0\na,x,1,9,100\n");
  const auto r = run({"scores", p.string()});
  EXPECT_EQ(r.code, cli::kIoError);
  EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
}

TEST_F(CliTest, CorrelatePerfectlyNegativePerImage) {
  const auto r = run({"correlate", class_map_ratings().string(), brisque_table().string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "images,n,pearson_level,pearson_brisque");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 7), "all,36,");
  // Per image: q = 6 - l except at l = 0, still strictly decreasing in l.
  while (std::getline(in, line)) {
    const auto cells = text::split_csv(line);
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_EQ(cells[1], "18");
    EXPECT_LT(std::stod(cells[2]), -0.95);
    EXPECT_NEAR(std::stod(cells[2]), std::stod(cells[3]), 1e-12);
  }
}

TEST_F(CliTest, CorrelateConstantIsUndefined) {
  const auto p = write("ratings.csv",
                       "subject_id,image_id,level,rating,t_start_ms\na,x,0,3,0\na,x,1,3,1\na,x,2,3,2\n");
  const auto r = run({"correlate", p.string(), brisque_table().string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("x,3,undefined,undefined"), std::string::npos) << r.out;
}

TEST_F(CliTest, IqxRecoversCurveFromMosFile) {
  std::string mos = "image_id,level,mos,dmos,count\n";
  std::string table = "image_id,level,brisque\n";
  for (int l = 0; l <= 5; ++l)
    for (const char* img : {"x", "y"}) {
      const double b = 5.0 + 17.0 * l + (img[0] == 'y' ? 3.0 : 0.0);
      mos += std::string(img) + "," + std::to_string(l) + "," + text::format_double(3.5 * std::exp(-0.03 * b) + 1.2) +
             ",,1\n";
      table += std::string(img) + "," + std::to_string(l) + "," + text::format_double(b) + "\n";
    }
  const auto r = run({"iqx", write("mos_dmos.csv", mos).string(), write("b.csv", table).string(), "-o",
                      dir_.string(), "--samples", "11"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::map<std::string, double> values;
  std::istringstream in(r.out);
  for (std::string line; std::getline(in, line);) {
    const auto c = text::split_csv(line);
    if (c.size() == 2 && c[0] != "step_converged" && c[0] != "note") values[c[0]] = std::stod(c[1]);
  }
  EXPECT_NEAR(values["alpha"], 3.5, 1e-5);
  EXPECT_NEAR(values["beta"], 0.03, 1e-7);
  EXPECT_NEAR(values["gamma"], 1.2, 1e-5);

  const auto curve = read_csv(dir_ / "iqx_curve.csv");
  ASSERT_EQ(curve.size(), 12u);
  for (std::size_t k = 2; k < curve.size(); ++k) EXPECT_LT(std::stod(curve[k][1]), std::stod(curve[k - 1][1]));
  EXPECT_DOUBLE_EQ(std::stod(curve[1][0]), 5.0);
  EXPECT_DOUBLE_EQ(std::stod(curve.back()[0]), 93.0);
}

TEST_F(CliTest, IqxFlatScoresNoted) {
  std::string ratings = "subject_id,image_id,level,rating,t_start_ms\n";
  for (int l = 0; l <= 5; ++l) ratings += "a,x," + std::to_string(l) + ",4," + std::to_string(l * 100) + "\n";
  const auto r = run({"iqx", write("r.csv", ratings).string(), brisque_table().string(), "-o", dir_.string()});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_NE(r.out.find("note,constant opinion scores"), std::string::npos);
  for (const auto& row : read_csv(dir_ / "iqx_curve.csv"))
    if (row[0] != "qos") EXPECT_NEAR(std::stod(row[1]), 4.0, 1e-6);
}

TEST_F(CliTest, IqxMissingBrisqueValue) {
  const auto p = write("b.csv", "image_id,level,brisque\nx,0,1\n");
  EXPECT_EQ(run({"iqx", class_map_ratings().string(), p.string(), "-o", dir_.string()}).code, cli::kInvalid);
}

TEST_F(CliTest, BrisqueFeaturesAndScore) {
  const std::string fixtures = QOE_FIXTURE_DIR;
  const std::vector<std::string> model{"--model", fixtures + "/brisque/allmodel", "--range",
                                       fixtures + "/brisque/allrange"};
  auto args = std::vector<std::string>{"brisque", fixtures + "/images/camera.png"};
  args.insert(args.end(), model.begin(), model.end());
  const auto score = run(args);
  ASSERT_EQ(score.code, cli::kOk) << score.err;
  EXPECT_TRUE(std::isfinite(std::stod(score.out)));

  args.push_back("--features");
  const auto features = run(args);
  ASSERT_EQ(features.code, cli::kOk);
  EXPECT_EQ(text::split_csv(features.out.substr(0, features.out.size() - 1)).size(), 36u);
}

TEST_F(CliTest, BrisqueMissingModelOrImage) {
  const std::string fixtures = QOE_FIXTURE_DIR;
  EXPECT_EQ(run({"brisque", fixtures + "/images/camera.png", "--model", (dir_ / "none").string(), "--range",
                 fixtures + "/brisque/allrange"})
                .code,
            cli::kIoError);
  EXPECT_EQ(run({"brisque", (dir_ / "none.png").string(), "--model", fixtures + "/brisque/allmodel", "--range",
                 fixtures + "/brisque/allrange"})
                .code,
            cli::kIoError);
}

TEST_F(CliTest, SynthThenPredictPerImage) {
  const auto data = dir_ / "data";
  const auto cfg = write("cfg.json", R"({"subjects": 5, "rating_rule": {"noise_sigma": 0.3}})");
  ASSERT_EQ(run({"synth", data.string(), "--config", cfg.string()}).code, cli::kOk);
  EXPECT_TRUE(fs::exists(data / "config.json"));
  EXPECT_TRUE(fs::exists(data / "eeg" / "s05.csv"));

  const std::vector<std::string> base{"predict",        "--ratings",      (data / "ratings.csv").string(),
                                      "--brisque",      (data / "brisque.csv").string(),
                                      "--group",        "per-image",      "--degree",
                                      "2",              "--stage1-min",   "50",
                                      "--stage2-min",   "20",             "--seed",
                                      "3"};
  auto args = base;
  args.insert(args.end(), {"-o", (dir_ / "out1").string()});
  const auto r = run(args);
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto summary = read_csv(dir_ / "out1" / "summary.csv");
  ASSERT_EQ(summary.size(), 7u);
  EXPECT_EQ(summary[0][0], "group");
  for (std::size_t k = 1; k < summary.size(); ++k) {
    EXPECT_EQ(summary[k][1], "linear");
    EXPECT_EQ(summary[k][2], "2");
    EXPECT_TRUE(fs::exists(dir_ / "out1" / "scatter" / (summary[k][0] + ".csv")));
  }
  const auto report = nlohmann::json::parse(slurp(dir_ / "out1" / "report.json"));
  EXPECT_EQ(report.at("reports").size(), 6u);

  args = base;
  args.insert(args.end(), {"-o", (dir_ / "out2").string(), "--workers", "3"});
  ASSERT_EQ(run(args).code, cli::kOk);
  EXPECT_EQ(slurp(dir_ / "out1" / "report.json"), slurp(dir_ / "out2" / "report.json"));
  EXPECT_EQ(slurp(dir_ / "out1" / "summary.csv"), slurp(dir_ / "out2" / "summary.csv"));
}

TEST_F(CliTest, PredictErrorPooling) {
  const auto data = dir_ / "data";
  ASSERT_EQ(run({"synth", data.string(), "--config", write("c.json", R"({"subjects": 3})").string()}).code, cli::kOk);
  const std::vector<std::string> base{"predict",      "--ratings",  (data / "ratings.csv").string(),
                                      "--brisque",    (data / "brisque.csv").string(),
                                      "--stage1-min", "50",         "--stage2-min",
                                      "20"};
  auto a = base, b = base, c = base;
  a.insert(a.end(), {"-o", (dir_ / "a").string()});
  b.insert(b.end(), {"-o", (dir_ / "b").string(), "--error-pooling", "per-run-mean"});
  c.insert(c.end(), {"-o", (dir_ / "c").string(), "--error-pooling", "median"});
  ASSERT_EQ(run(a).code, cli::kOk);
  ASSERT_EQ(run(b).code, cli::kOk);
  EXPECT_EQ(run(c).code, cli::kIoError);
  const auto ja = nlohmann::json::parse(slurp(dir_ / "a" / "report.json"));
  const auto jb = nlohmann::json::parse(slurp(dir_ / "b" / "report.json"));
  EXPECT_EQ(ja.at("spec").at("error_pooling"), "pooled");
  EXPECT_EQ(jb.at("spec").at("error_pooling"), "per_run_mean");
}

TEST_F(CliTest, PredictEegNeedsDirectory) {
  const auto r = run({"predict", "--ratings", class_map_ratings().string(), "--brisque", brisque_table().string(),
                      "--source", "eeg", "-o", dir_.string()});
  EXPECT_EQ(r.code, cli::kInvalid);
  EXPECT_NE(r.err.find("--eeg-dir"), std::string::npos);
}

TEST_F(CliTest, PredictLogisticOnRealTargetRejected) {
  const auto r = run({"predict", "--ratings", class_map_ratings().string(), "--brisque", brisque_table().string(),
                      "--method", "logistic", "--target", "brisque", "-o", dir_.string()});
  EXPECT_EQ(r.code, cli::kInvalid);
}

TEST_F(CliTest, SynthBadConfig) {
  EXPECT_EQ(run({"synth", (dir_ / "d").string(), "--config", write("c.json", "{not json").string()}).code,
            cli::kIoError);
  EXPECT_EQ(run({"synth", (dir_ / "d").string(), "--config", write("c.json", R"({"subjects": 0})").string()}).code,
            cli::kInvalid);
}
