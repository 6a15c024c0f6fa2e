#include "stereogt/image.hpp"

#include <algorithm>

namespace stereogt {

GrayImage to_gray(const RgbImage& rgb) {
  if (rgb.channels() == 1) return rgb;
  if (rgb.channels() != 3) throw Error(ErrorCode::kFormat, "expected an RGB image");
  GrayImage gray(rgb.width(), rgb.height());
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      // ITU-R BT.601 luma in 8.8 fixed point
      const int v = 77 * rgb.at(x, y, 0) + 150 * rgb.at(x, y, 1) + 29 * rgb.at(x, y, 2);
      gray.at(x, y) = static_cast<std::uint8_t>((v + 128) >> 8);
    }
  }
  return gray;
}

RgbImage gray_to_rgb(const GrayImage& gray) {
  RgbImage rgb(gray.width(), gray.height(), 3);
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = gray.at(x, y);
    }
  }
  return rgb;
}

GrayImage mirror_horizontal(const GrayImage& img) {
  GrayImage out(img.width(), img.height(), img.channels());
  const int w = img.width();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(w - 1 - x, y, c) = img.at(x, y, c);
    }
  }
  return out;
}

}  // namespace stereogt
