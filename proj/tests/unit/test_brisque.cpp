#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "qoe/brisque.hpp"
#include "qoe/error.hpp"
#include "qoe/image_io.hpp"
#include "qoe/svr_model.hpp"

using namespace qoe;
using namespace qoe::iqa;

namespace {

GrayImage texture(int w, int h, std::uint64_t seed, double scale = 1.0, double offset = 128.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 20.0);
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  // Smooth-ish texture: noise plus a couple of gradients so statistics are not trivial.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      v[static_cast<std::size_t>(y) * w + x] = offset + scale * (n(rng) + 10.0 * std::sin(0.3 * x) * std::cos(0.2 * y));
  return GrayImage(w, h, std::move(v));
}

GrayImage rotate_cw(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  // (x, y) -> (h - 1 - y, x) in a w' = h, h' = w image.
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) v[static_cast<std::size_t>(x) * h + (h - 1 - y)] = img.at(x, y);
  return GrayImage(h, w, std::move(v));
}

// Direct 2-D convolution with an independently built 7x7 kernel.
std::vector<double> mscn_oracle(const GrayImage& img, double c) {
  const int w = img.width(), h = img.height();
  double kernel[7][7];
  double total = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j) {
      const double dy = i - 3, dx = j - 3;
      kernel[i][j] = std::exp(-(dx * dx + dy * dy) / (2.0 * (7.0 / 6.0) * (7.0 / 6.0)));
      total += kernel[i][j];
    }
  const auto mirror = [](int i, int n) {
    if (i < 0) return -i;
    if (i >= n) return 2 * n - 2 - i;
    return i;
  };
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double mu = 0.0, mu2 = 0.0;
      for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 7; ++j) {
          const double v = img.at(mirror(x + j - 3, w), mirror(y + i - 3, h));
          mu += kernel[i][j] / total * v;
          mu2 += kernel[i][j] / total * v * v;
        }
      out[static_cast<std::size_t>(y) * w + x] = (img.at(x, y) - mu) / (std::sqrt(std::abs(mu2 - mu * mu)) + c);
    }
  return out;
}

SvrModel bundled_model() {
  std::ifstream model(std::string(QOE_FIXTURE_DIR) + "/brisque/allmodel");
  std::ifstream range(std::string(QOE_FIXTURE_DIR) + "/brisque/allrange");
  return load_model(model, range);
}

}  // namespace

TEST(ToGray, WhiteIs255) {
  std::vector<std::uint8_t> rgb(16 * 16 * 3, 255);
  const auto g = to_gray(rgb, 16, 16);
  for (double v : g.luma()) EXPECT_DOUBLE_EQ(v, 255.0);
}

TEST(ToGray, PureRed) {
  std::vector<std::uint8_t> rgb(20 * 18 * 3, 0);
  for (std::size_t k = 0; k < rgb.size(); k += 3) rgb[k] = 255;
  const auto g = to_gray(rgb, 20, 18);
  for (double v : g.luma()) EXPECT_NEAR(v, 76.245, 1e-12);
}

TEST(ToGray, UndersizedRejected) {
  std::vector<std::uint8_t> rgb(8 * 8 * 3, 0);
  EXPECT_THROW(to_gray(rgb, 8, 8), DimensionError);
  std::vector<std::uint8_t> short_buffer(16 * 16 * 3 - 1, 0);
  EXPECT_THROW(to_gray(short_buffer, 16, 16), DimensionError);
}

TEST(Mscn, ConstantImageIsZero) {
  const GrayImage img(24, 20, std::vector<double>(24 * 20, 128.0));
  const auto m = compute_mscn(img);
  for (double v : m.values) EXPECT_EQ(v, 0.0);
}

TEST(Mscn, MatchesDirectConvolution) {
  const auto img = texture(33, 27, 5);
  const auto m = compute_mscn(img);
  const auto oracle = mscn_oracle(img, 1.0);
  ASSERT_EQ(m.values.size(), oracle.size());
  for (std::size_t k = 0; k < oracle.size(); ++k) EXPECT_NEAR(m.values[k], oracle[k], 1e-9);
}

TEST(Mscn, CheckerboardAlternatesWithZeroMean) {
  const int w = 20, h = 16;
  std::vector<double> v(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) v[static_cast<std::size_t>(y) * w + x] = (x + y) % 2 ? 255.0 : 0.0;
  const GrayImage img(w, h, v);
  const auto m = compute_mscn(img);
  const auto oracle = mscn_oracle(img, 1.0);
  double sum = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double value = m.at(x, y);
      EXPECT_NEAR(value, oracle[static_cast<std::size_t>(y) * w + x], 1e-9);
      EXPECT_EQ(value > 0.0, (x + y) % 2 == 1);
      sum += value;
    }
  EXPECT_NEAR(sum / (w * h), 0.0, 1e-12);
}

TEST(Mscn, ApproachesUnstabilizedFieldUnderScaling) {
  // Zero-mean texture scaled by c: the +1 stabilizer matters less as c grows.
  double previous = INFINITY;
  for (double c : {1.0, 10.0, 100.0, 1000.0}) {
    const auto img = texture(32, 32, 9, c, 0.0);
    const auto m = compute_mscn(img);
    const auto limit = mscn_oracle(img, 0.0);
    double dist = 0.0;
    for (std::size_t k = 0; k < limit.size(); ++k) dist = std::max(dist, std::abs(m.values[k] - limit[k]));
    EXPECT_LT(dist, previous);
    previous = dist;
  }
  EXPECT_LT(previous, 1e-3);
}

TEST(Mscn, NaturalImageMeanNearZero) {
  const auto img = read_gray(std::string(QOE_FIXTURE_DIR) + "/images/astronaut.png");
  const auto m = compute_mscn(img);
  double sum = 0.0;
  for (double v : m.values) {
    ASSERT_TRUE(std::isfinite(v));
    sum += v;
  }
  EXPECT_NEAR(sum / static_cast<double>(m.values.size()), 0.0, 0.1);
}

TEST(Aggd, StandardGaussian) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> s(1'000'000);
  for (auto& v : s) v = n(rng);
  const auto p = fit_aggd(s);
  EXPECT_NEAR(p.shape, 2.0, 0.04);
  EXPECT_NEAR(p.sigma_left / p.sigma_right, 1.0, 0.02);
  EXPECT_GT(p.shape, 0.2);
  EXPECT_LT(p.shape, 10.0);
}

TEST(Aggd, Laplacian) {
  std::mt19937_64 rng(43);
  std::exponential_distribution<double> e(1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> s(1'000'000);
  for (auto& v : s) v = sign(rng) ? e(rng) : -e(rng);
  EXPECT_NEAR(fit_aggd(s).shape, 1.0, 0.03);
}

TEST(Aggd, ErrorShrinksWithSampleCount) {
  // Mean absolute error over several seeds at N = 1e4, 1e5, 1e6.
  const auto error_at = [](std::size_t n) {
    double total = 0.0;
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
      std::mt19937_64 rng(seed * 1000 + n);
      std::normal_distribution<double> d(0.0, 1.0);
      std::vector<double> s(n);
      for (auto& v : s) v = d(rng);
      const auto p = fit_aggd(s);
      total += std::abs(p.shape - 2.0) / 2.0 + std::abs(p.sigma_left - 1.0) + std::abs(p.sigma_right - 1.0);
    }
    return total / 4.0;
  };
  const double e4 = error_at(10'000), e5 = error_at(100'000), e6 = error_at(1'000'000);
  EXPECT_GT(e4, e5);
  EXPECT_GT(e5, e6);
}

TEST(Aggd, AllZeroIsDegenerate) {
  std::vector<double> zeros(500, 0.0);
  EXPECT_THROW(fit_aggd(zeros), DegenerateError);
  EXPECT_THROW(fit_ggd(zeros), DegenerateError);
}

TEST(Aggd, TooFewSamples) {
  std::vector<double> s(99, 1.0);
  EXPECT_THROW(fit_aggd(s), DimensionError);
}

TEST(Ggd, VarianceIsMeanSquare) {
  std::vector<double> s;
  for (int k = 0; k < 200; ++k) s.push_back(k % 2 ? 2.0 : -2.0);
  const auto g = fit_ggd(s);
  EXPECT_DOUBLE_EQ(g.variance, 4.0);
  // |x| constant gives the largest ratio E|x|^2/E[x^2] = 1, i.e. the top of the table.
  EXPECT_NEAR(g.shape, 10.0, 1e-9);
}

TEST(Features, LengthAndFinite) {
  const auto f = extract_features(texture(40, 30, 2));
  EXPECT_EQ(f.values.size(), 36u);
  for (double v : f.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(Features, MinimumSizeImage) {
  const auto f = extract_features(texture(16, 16, 8));
  for (double v : f.values) EXPECT_TRUE(std::isfinite(v));
}

TEST(Features, Deterministic) {
  const auto img = texture(48, 40, 3);
  EXPECT_EQ(extract_features(img), extract_features(img));
}

TEST(Features, RotationPermutesOrientations) {
  const auto img = texture(48, 32, 4);
  const auto a = extract_features(img);
  const auto b = extract_features(rotate_cw(img));
  for (std::size_t scale : {0u, 18u}) {
    EXPECT_NEAR(a[scale + 0], b[scale + 0], 1e-6);
    EXPECT_NEAR(a[scale + 1], b[scale + 1], 1e-6);
    // horizontal <-> vertical, main diagonal <-> secondary diagonal
    const std::size_t swap[4] = {1, 0, 3, 2};
    for (std::size_t o = 0; o < 4; ++o)
      for (std::size_t k = 0; k < 4; ++k)
        EXPECT_NEAR(a[scale + 2 + 4 * o + k], b[scale + 2 + 4 * swap[o] + k], 1e-6) << "orientation " << o;
  }
}

TEST(Features, LumaOffsetInvariance) {
  const auto a = extract_features(texture(40, 40, 6, 1.0, 100.0));
  const auto b = extract_features(texture(40, 40, 6, 1.0, 110.0));
  EXPECT_LT(std::abs(a[0] - b[0]), 1e-6);
  EXPECT_LT(std::abs(a[1] - b[1]), 1e-6);
}

TEST(BrisqueScore, JpegRecompressionRaisesScore) {
  const auto model = bundled_model();
  for (const char* name : {"astronaut", "chelsea", "camera", "coffee"}) {
    const std::string base = std::string(QOE_FIXTURE_DIR) + "/images/" + name;
    const double original = score(extract_features(read_gray(base + ".png")), model);
    const double q10 = score(extract_features(read_gray(base + "_q10.jpg")), model);
    EXPECT_TRUE(std::isfinite(original));
    EXPECT_LT(original, q10) << name;
  }
}

TEST(ImageIo, MissingFileIsIoError) {
  EXPECT_THROW(read_gray("/nonexistent/file.png"), IoError);
}
