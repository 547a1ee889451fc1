#pragma once

// No-reference spatial image quality (BRISQUE): natural-scene statistics of
// mean-subtracted contrast-normalized luminance, scored by a pretrained
// RBF support-vector regressor (see svr_model.hpp).

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qoe::iqa {

inline constexpr int kMinImageSide = 16;
inline constexpr std::size_t kFeatureCount = 36;
inline constexpr std::size_t kMinFitSamples = 100;

// Single-channel image with luma in [0, 255], row-major.
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<double> luma);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const double> luma() const noexcept { return luma_; }
  double at(int x, int y) const noexcept {
    return luma_[static_cast<std::size_t>(y) * width_ + x];
  }

 private:
  int width_;
  int height_;
  std::vector<double> luma_;
};

struct MscnField {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const noexcept {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

// Asymmetric generalized Gaussian fit. sigma_left/sigma_right are the
// root-mean-square of the negative/positive samples (0 if a side is empty).
struct AggdParams {
  double shape = 0.0;
  double sigma_left = 0.0;
  double sigma_right = 0.0;
  double mean_offset = 0.0;
};

// Symmetric special case: shape and variance (mean square) of the samples.
struct GgdParams {
  double shape = 0.0;
  double variance = 0.0;
};

struct BrisqueFeatures {
  std::array<double, kFeatureCount> values{};

  double operator[](std::size_t k) const noexcept { return values[k]; }
  bool operator==(const BrisqueFeatures&) const = default;
};

// Interleaved 8-bit RGB -> BT.601 luma. Throws DimensionError for images
// smaller than 16x16 or a buffer whose size is not width*height*3.
GrayImage to_gray(std::span<const std::uint8_t> rgb, int width, int height);

// (I - mu) / (sigma + 1) with mu, sigma from a 7x7 Gaussian window
// (scale 7/6, unit sum) and mirror-reflected borders.
MscnField compute_mscn(const GrayImage& img);

// Moment-matching fits over the shape table [0.2, 10] at step 0.001.
// Both require >= 100 samples that are not all zero.
AggdParams fit_aggd(std::span<const double> samples);
GgdParams fit_ggd(std::span<const double> samples);

// 18 features at full resolution followed by 18 after 2x2 block averaging.
BrisqueFeatures extract_features(const GrayImage& img);

}  // namespace qoe::iqa
