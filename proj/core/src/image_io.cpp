#include "qoe/image_io.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "qoe/error.hpp"

namespace qoe::iqa {

GrayImage read_gray(const std::filesystem::path& path) {
  const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw IoError("cannot decode image " + path.string());
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  if (!rgb.isContinuous()) rgb = rgb.clone();
  const std::span<const std::uint8_t> pixels(rgb.ptr<std::uint8_t>(), rgb.total() * 3);
  return to_gray(pixels, rgb.cols, rgb.rows);
}

}  // namespace qoe::iqa
