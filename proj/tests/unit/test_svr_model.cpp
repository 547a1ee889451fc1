#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "qoe/error.hpp"
#include "qoe/svr_model.hpp"

using namespace qoe;
using namespace qoe::iqa;

namespace {

const char* kToyModel =
    "svm_type epsilon_svr\n"
    "kernel_type rbf\n"
    "gamma 0.5\n"
    "nr_class 2\n"
    "total_sv 2\n"
    "rho -0.25\n"
    "SV\n"
    "3 1:0.5 2:-0.25 36:1\n"
    "-1.5 4:0.125\n";

std::string unit_range(std::size_t features = 36, const std::string& y_section = "") {
  std::string s = y_section + "x\n-1 1\n";
  for (std::size_t k = 1; k <= features; ++k) s += std::to_string(k) + " 0 2\n";
  return s;
}

SvrModel parse(const std::string& model, const std::string& range) {
  std::istringstream m(model), r(range);
  return load_model(m, r);
}

std::string parse_error(const std::string& model, const std::string& range) {
  try {
    parse(model, range);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(LoadModel, ToyModel) {
  const auto m = parse(kToyModel, unit_range());
  ASSERT_EQ(m.support_vectors.size(), 2u);
  ASSERT_EQ(m.dual_coefficients.size(), 2u);
  EXPECT_DOUBLE_EQ(m.kernel_gamma, 0.5);
  EXPECT_DOUBLE_EQ(m.rho, -0.25);
  EXPECT_DOUBLE_EQ(m.dual_coefficients[0], 3.0);
  EXPECT_DOUBLE_EQ(m.support_vectors[0][0], 0.5);
  EXPECT_DOUBLE_EQ(m.support_vectors[0][1], -0.25);
  EXPECT_DOUBLE_EQ(m.support_vectors[0][2], 0.0);
  EXPECT_DOUBLE_EQ(m.support_vectors[0][35], 1.0);
  EXPECT_DOUBLE_EQ(m.support_vectors[1][3], 0.125);
  EXPECT_DOUBLE_EQ(m.feature_upper[20], 2.0);
  EXPECT_FALSE(m.score_range.has_value());
}

TEST(LoadModel, RangeWith35Features) {
  const auto msg = parse_error(kToyModel, unit_range(35));
  EXPECT_NE(msg.find("35 features"), std::string::npos) << msg;
}

TEST(LoadModel, MissingRhoNamed) {
  std::string model = kToyModel;
  model.erase(model.find("rho -0.25\n"), 10);
  const auto msg = parse_error(model, unit_range());
  EXPECT_NE(msg.find("rho"), std::string::npos) << msg;
}

TEST(LoadModel, NonMonotoneIndicesCarryLine) {
  std::string model = kToyModel;
  model.replace(model.find("3 1:0.5 2:-0.25"), 15, "3 2:0.5 1:-0.25");
  std::istringstream m(model), r(unit_range());
  try {
    load_model(m, r);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8u);
  }
}

TEST(LoadModel, IndexBeyond36) {
  std::string model = kToyModel;
  model.replace(model.find("36:1"), 4, "37:1");
  EXPECT_THROW(parse(model, unit_range()), ParseError);
}

TEST(LoadModel, TotalSvMismatch) {
  std::string model = kToyModel;
  model.replace(model.find("total_sv 2"), 10, "total_sv 3");
  EXPECT_THROW(parse(model, unit_range()), ParseError);
}

TEST(LoadModel, ScoreRangeSection) {
  const auto m = parse(kToyModel, unit_range(36, "y\n-1 1\n0 100\n"));
  ASSERT_TRUE(m.score_range.has_value());
  EXPECT_DOUBLE_EQ(m.score_range->score_max, 100.0);
}

TEST(LoadModel, BundledModel) {
  std::ifstream model(std::string(QOE_FIXTURE_DIR) + "/brisque/allmodel");
  std::ifstream range(std::string(QOE_FIXTURE_DIR) + "/brisque/allrange");
  const auto m = load_model(model, range);
  EXPECT_EQ(m.support_vectors.size(), 774u);
  EXPECT_DOUBLE_EQ(m.kernel_gamma, 0.05);
  for (std::size_t k = 0; k < kFeatureCount; ++k) EXPECT_GE(m.feature_upper[k], m.feature_lower[k]);
}

TEST(Score, LoneSupportVectorGivesCoefficient) {
  SvrModel m;
  m.kernel_gamma = 0.7;
  m.rho = 0.0;
  m.feature_lower.fill(-1.0);
  m.feature_upper.fill(1.0);
  FeatureVector sv{};
  for (std::size_t k = 0; k < kFeatureCount; ++k) sv[k] = 0.02 * static_cast<double>(k) - 0.3;
  m.support_vectors = {sv};
  m.dual_coefficients = {4.25};
  BrisqueFeatures f;
  f.values = sv;
  EXPECT_DOUBLE_EQ(score(f, m), 4.25);
}

TEST(Score, ScalingAndKernelOracle) {
  const auto m = parse(kToyModel, unit_range(36, "y\n-1 1\n0 100\n"));
  BrisqueFeatures f;
  for (std::size_t k = 0; k < kFeatureCount; ++k) f.values[k] = 0.05 * static_cast<double>(k);
  // Direct evaluation: x = -1 + (f - 0) * 2 / 2 = f - 1.
  double decision = 0.25;
  for (std::size_t j = 0; j < 2; ++j) {
    double d2 = 0.0;
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      const double diff = (f.values[k] - 1.0) - m.support_vectors[j][k];
      d2 += diff * diff;
    }
    decision += m.dual_coefficients[j] * std::exp(-0.5 * d2);
  }
  EXPECT_NEAR(score(f, m), (decision + 1.0) * 50.0, 1e-12);
}

TEST(Score, ConstantFeatureScalesToZero) {
  SvrModel m;
  m.feature_lower.fill(3.0);
  m.feature_upper.fill(3.0);
  BrisqueFeatures f;
  f.values.fill(7.0);
  for (double v : scale_features(f, m)) EXPECT_EQ(v, 0.0);
}
