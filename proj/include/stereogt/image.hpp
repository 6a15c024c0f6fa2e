#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stereogt/error.hpp"

namespace stereogt {

// Row-major, channel-interleaved raster.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, int channels = 1, T fill = T{})
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels <= 0) {
      throw Error(ErrorCode::kDimension, "negative image size");
    }
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * height_;
  }
  bool empty() const noexcept { return data_.empty(); }
  bool same_shape(const Image& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && channels_ == o.channels_;
  }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  T& at(int x, int y, int c = 0) noexcept { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const noexcept { return data_[index(x, y, c)]; }

  T* row(int y) noexcept { return data_.data() + index(0, y, 0); }
  const T* row(int y) const noexcept { return data_.data() + index(0, y, 0); }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using GrayImage = Image<std::uint8_t>;
using RgbImage = Image<std::uint8_t>;  // three channels, R G B order
using FloatImage = Image<float>;

// Per-pixel disparity in pixels; 0.0 encodes invalid.
class DisparityMap : public Image<float> {
 public:
  DisparityMap() = default;
  DisparityMap(int width, int height, float fill = 0.0f) : Image<float>(width, height, 1, fill) {}
  explicit DisparityMap(Image<float> img) : Image<float>(std::move(img)) {
    if (channels() != 1) throw Error(ErrorCode::kFormat, "disparity map must be single channel");
  }

  static bool is_valid_value(float d) noexcept { return std::isfinite(d) && d > 0.0f; }
  bool valid(int x, int y) const noexcept { return is_valid_value(at(x, y)); }
};

// Per-pixel metric depth in millimetres; non-positive or non-finite is invalid.
class DepthMap : public Image<float> {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, float fill = 0.0f) : Image<float>(width, height, 1, fill) {}
  explicit DepthMap(Image<float> img) : Image<float>(std::move(img)) {
    if (channels() != 1) throw Error(ErrorCode::kFormat, "depth map must be single channel");
  }

  static bool is_valid_value(float z) noexcept { return std::isfinite(z) && z > 0.0f; }
  bool valid(int x, int y) const noexcept { return is_valid_value(at(x, y)); }
};

GrayImage to_gray(const RgbImage& rgb);
RgbImage gray_to_rgb(const GrayImage& gray);
GrayImage mirror_horizontal(const GrayImage& img);

}  // namespace stereogt
