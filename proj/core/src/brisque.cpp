#include "qoe/brisque.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qoe/error.hpp"

namespace qoe::iqa {

namespace {

constexpr double kShapeMin = 0.2;
constexpr double kShapeMax = 10.0;
constexpr double kShapeStep = 0.001;
constexpr int kWindowRadius = 3;
constexpr double kWindowScale = 7.0 / 6.0;
constexpr double kStabilizer = 1.0;

// Row-major plane without the minimum-size invariant of GrayImage; the
// coarse scale of a small image can drop below 16 pixels per side.
struct Plane {
  int width = 0;
  int height = 0;
  std::vector<double> data;
};

// Generalized Gaussian ratio Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)), increasing in a.
struct ShapeTable {
  std::vector<double> shape;
  std::vector<double> ratio;

  ShapeTable() {
    const auto count = static_cast<std::size_t>(std::lround((kShapeMax - kShapeMin) / kShapeStep)) + 1;
    shape.reserve(count);
    ratio.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      const double a = kShapeMin + kShapeStep * static_cast<double>(k);
      shape.push_back(a);
      ratio.push_back(std::exp(2.0 * std::lgamma(2.0 / a) - std::lgamma(1.0 / a) - std::lgamma(3.0 / a)));
    }
  }

  double lookup(double target) const {
    const auto it = std::lower_bound(ratio.begin(), ratio.end(), target);
    if (it == ratio.begin()) return shape.front();
    if (it == ratio.end()) return shape.back();
    const auto hi = static_cast<std::size_t>(it - ratio.begin());
    const auto lo = hi - 1;
    return (target - ratio[lo] <= ratio[hi] - target) ? shape[lo] : shape[hi];
  }
};

const ShapeTable& shape_table() {
  static const ShapeTable table;
  return table;
}

std::array<double, 2 * kWindowRadius + 1> gaussian_taps() {
  std::array<double, 2 * kWindowRadius + 1> taps{};
  double sum = 0.0;
  for (int k = -kWindowRadius; k <= kWindowRadius; ++k) {
    const double w = std::exp(-(k * k) / (2.0 * kWindowScale * kWindowScale));
    taps[static_cast<std::size_t>(k + kWindowRadius)] = w;
    sum += w;
  }
  for (auto& w : taps) w /= sum;
  return taps;
}

// Reflect-101: -1 -> 1, n -> n-2.
int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

std::vector<double> gaussian_blur(const std::vector<double>& src, int width, int height) {
  static const auto taps = gaussian_taps();
  std::vector<double> tmp(src.size());
  std::vector<double> out(src.size());
  for (int y = 0; y < height; ++y) {
    const double* row = src.data() + static_cast<std::size_t>(y) * width;
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -kWindowRadius; k <= kWindowRadius; ++k)
        acc += taps[static_cast<std::size_t>(k + kWindowRadius)] * row[reflect(x + k, width)];
      tmp[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int k = -kWindowRadius; k <= kWindowRadius; ++k)
        acc += taps[static_cast<std::size_t>(k + kWindowRadius)] *
               tmp[static_cast<std::size_t>(reflect(y + k, height)) * width + x];
      out[static_cast<std::size_t>(y) * width + x] = acc;
    }
  }
  return out;
}

MscnField mscn_of(const Plane& p) {
  std::vector<double> squared(p.data.size());
  std::transform(p.data.begin(), p.data.end(), squared.begin(), [](double v) { return v * v; });
  const auto mu = gaussian_blur(p.data, p.width, p.height);
  const auto mu2 = gaussian_blur(squared, p.width, p.height);

  MscnField field{p.width, p.height, std::vector<double>(p.data.size())};
  for (std::size_t k = 0; k < p.data.size(); ++k) {
    const double sigma = std::sqrt(std::abs(mu2[k] - mu[k] * mu[k]));
    field.values[k] = (p.data[k] - mu[k]) / (sigma + kStabilizer);
  }
  return field;
}

Plane downsample_half(const Plane& p) {
  Plane out{p.width / 2, p.height / 2, {}};
  out.data.resize(static_cast<std::size_t>(out.width) * out.height);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const auto at = [&](int xx, int yy) { return p.data[static_cast<std::size_t>(yy) * p.width + xx]; };
      out.data[static_cast<std::size_t>(y) * out.width + x] =
          0.25 * (at(2 * x, 2 * y) + at(2 * x + 1, 2 * y) + at(2 * x, 2 * y + 1) + at(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

AggdParams aggd_moments(std::span<const double> samples) {
  double left_sq = 0.0, right_sq = 0.0, abs_sum = 0.0, sq_sum = 0.0;
  std::size_t left_n = 0, right_n = 0;
  for (double v : samples) {
    if (v < 0.0) {
      left_sq += v * v;
      ++left_n;
    } else if (v > 0.0) {
      right_sq += v * v;
      ++right_n;
    }
    abs_sum += std::abs(v);
    sq_sum += v * v;
  }
  if (sq_sum == 0.0) throw DegenerateError("distribution fit: all samples are zero");

  const double n = static_cast<double>(samples.size());
  const double l = left_n ? std::sqrt(left_sq / static_cast<double>(left_n)) : 0.0;
  const double r = right_n ? std::sqrt(right_sq / static_cast<double>(right_n)) : 0.0;
  const double mean_abs = abs_sum / n;
  const double r_hat = mean_abs * mean_abs / (sq_sum / n);
  // (g^3 + 1)(g + 1)/(g^2 + 1)^2 with g = l/r, multiplied through by r^4.
  const double l2 = l * l, r2 = r * r;
  const double correction = (l2 * l + r2 * r) * (l + r) / ((l2 + r2) * (l2 + r2));

  AggdParams p;
  p.shape = shape_table().lookup(r_hat * correction);
  p.sigma_left = l;
  p.sigma_right = r;
  const double lg1 = std::lgamma(1.0 / p.shape);
  const double lg2 = std::lgamma(2.0 / p.shape);
  const double lg3 = std::lgamma(3.0 / p.shape);
  p.mean_offset = (r - l) * std::exp(lg2 - lg1) * std::exp(0.5 * (lg1 - lg3));
  return p;
}

GgdParams ggd_moments(std::span<const double> samples) {
  double abs_sum = 0.0, sq_sum = 0.0;
  for (double v : samples) {
    abs_sum += std::abs(v);
    sq_sum += v * v;
  }
  if (sq_sum == 0.0) throw DegenerateError("distribution fit: all samples are zero");
  const double n = static_cast<double>(samples.size());
  const double mean_abs = abs_sum / n;
  const double variance = sq_sum / n;
  return {shape_table().lookup(mean_abs * mean_abs / variance), variance};
}

void require_sample_count(std::size_t n) {
  if (n < kMinFitSamples)
    throw DimensionError("distribution fit needs at least " + std::to_string(kMinFitSamples) +
                         " samples, got " + std::to_string(n));
}

// Neighbor products: horizontal, vertical, main diagonal, secondary diagonal.
std::array<std::vector<double>, 4> pair_products(const MscnField& m) {
  const int w = m.width, h = m.height;
  std::array<std::vector<double>, 4> out;
  out[0].reserve(static_cast<std::size_t>(w - 1) * h);
  out[1].reserve(static_cast<std::size_t>(w) * (h - 1));
  out[2].reserve(static_cast<std::size_t>(w - 1) * (h - 1));
  out[3].reserve(static_cast<std::size_t>(w - 1) * (h - 1));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x + 1 < w; ++x) out[0].push_back(m.at(x, y) * m.at(x + 1, y));
  for (int y = 0; y + 1 < h; ++y)
    for (int x = 0; x < w; ++x) out[1].push_back(m.at(x, y) * m.at(x, y + 1));
  for (int y = 0; y + 1 < h; ++y)
    for (int x = 0; x + 1 < w; ++x) {
      out[2].push_back(m.at(x, y) * m.at(x + 1, y + 1));
      out[3].push_back(m.at(x + 1, y) * m.at(x, y + 1));
    }
  return out;
}

void append_scale(const Plane& p, std::size_t offset, BrisqueFeatures& f) {
  const MscnField m = mscn_of(p);
  const GgdParams g = ggd_moments(m.values);
  f.values[offset + 0] = g.shape;
  f.values[offset + 1] = g.variance;
  const auto products = pair_products(m);
  for (std::size_t k = 0; k < products.size(); ++k) {
    const AggdParams a = aggd_moments(products[k]);
    const std::size_t base = offset + 2 + 4 * k;
    f.values[base + 0] = a.shape;
    f.values[base + 1] = a.mean_offset;
    f.values[base + 2] = a.sigma_left * a.sigma_left;
    f.values[base + 3] = a.sigma_right * a.sigma_right;
  }
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::vector<double> luma)
    : width_(width), height_(height), luma_(std::move(luma)) {
  if (width < kMinImageSide || height < kMinImageSide)
    throw DimensionError("image must be at least 16x16, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  if (luma_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw DimensionError("luma buffer size does not match width*height");
}

GrayImage to_gray(std::span<const std::uint8_t> rgb, int width, int height) {
  if (width < kMinImageSide || height < kMinImageSide)
    throw DimensionError("image must be at least 16x16, got " + std::to_string(width) + "x" +
                         std::to_string(height));
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (rgb.size() != 3 * n) throw DimensionError("RGB buffer size does not match width*height*3");
  std::vector<double> luma(n);
  for (std::size_t k = 0; k < n; ++k)
    luma[k] = 0.299 * rgb[3 * k] + 0.587 * rgb[3 * k + 1] + 0.114 * rgb[3 * k + 2];
  return GrayImage(width, height, std::move(luma));
}

MscnField compute_mscn(const GrayImage& img) {
  const auto luma = img.luma();
  return mscn_of(Plane{img.width(), img.height(), {luma.begin(), luma.end()}});
}

AggdParams fit_aggd(std::span<const double> samples) {
  require_sample_count(samples.size());
  return aggd_moments(samples);
}

GgdParams fit_ggd(std::span<const double> samples) {
  require_sample_count(samples.size());
  return ggd_moments(samples);
}

BrisqueFeatures extract_features(const GrayImage& img) {
  const auto luma = img.luma();
  Plane full{img.width(), img.height(), {luma.begin(), luma.end()}};
  BrisqueFeatures f;
  append_scale(full, 0, f);
  append_scale(downsample_half(full), kFeatureCount / 2, f);
  return f;
}

}  // namespace qoe::iqa
