#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stereogt/image.hpp"

namespace stereogt {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Raster files

// Single-channel 32-bit float TIFF; every value survives bit-exactly.
void write_disparity_subpixel(const fs::path& path, const DisparityMap& d);

struct QuantizationReport {
  std::size_t valid_in = 0;      // valid pixels before rounding
  std::size_t lost_to_zero = 0;  // valid pixels whose value rounded to 0
  double max_abs_error = 0.0;    // over pixels that stay valid
};

// Rounds half-up to integers. Throws kRangeOverflow if any rounded value
// reaches 256. Disparities below 0.5 become 0 (invalid) and are counted.
DisparityMap quantize_disparity(const DisparityMap& d, QuantizationReport* report = nullptr);

// 8-bit single-channel PNG of quantize_disparity(d).
QuantizationReport write_disparity_pixel(const fs::path& path, const DisparityMap& d);

// Precision inferred from the file signature: 8-bit grayscale PNG or
// single-channel float32 TIFF. Anything else is a kFormat error.
DisparityMap read_disparity(const fs::path& path);

// Depth in millimetres from a 16-bit grayscale PNG (0 = invalid) or a
// float32 TIFF.
DepthMap read_depth(const fs::path& path);
void write_depth_png16(const fs::path& path, const DepthMap& depth);
void write_depth_tiff(const fs::path& path, const DepthMap& depth);

// 8-bit PNG views. Grayscale, palette and alpha inputs are converted to RGB.
RgbImage read_rgb(const fs::path& path);
void write_png(const fs::path& path, const Image<std::uint8_t>& img);  // 1 or 3 channels

// ---------------------------------------------------------------------------
// Dataset layout: <root>/<subset>/<split>/{left,right,disp}/<index>.<ext>
// with zero-padded six digit indices; disp is .tiff (sub-pixel) or .png.

enum class Split { kTrain, kValidation, kTest };

std::string_view to_string(Split s);
Split parse_split(std::string_view s);

struct SubsetInfo {
  std::string name;
  int train = 0;
  int validation = 0;
  int test = 0;
  int width = 0;
  int height = 0;

  int count(Split s) const noexcept;
  int total() const noexcept { return train + validation + test; }
};

struct DatasetManifest {
  std::vector<SubsetInfo> subsets;

  const SubsetInfo& find(std::string_view subset) const;  // kNotFound
  int total(Split s) const noexcept;
  int total() const noexcept;
};

// The four-subset plant dataset: spinach, tomato, pepper, pumpkin.
DatasetManifest default_manifest();

// Text form, one subset per line: `<name> <train> <validation> <test> <W>x<H>`.
// '#' starts a comment.
DatasetManifest parse_manifest(std::string_view text);
std::string format_manifest(const DatasetManifest& m);
// <root>/manifest.txt when present, default_manifest() otherwise.
DatasetManifest load_manifest(const fs::path& root);

struct StereoSample {
  RgbImage left;
  RgbImage right;
  std::optional<DisparityMap> ground_truth;
  std::string subset;
  Split split = Split::kTrain;
  int index = 0;
};

struct SamplePaths {
  fs::path left;
  fs::path right;
  fs::path disp_subpixel;
  fs::path disp_pixel;
};

SamplePaths sample_paths(const fs::path& root, std::string_view subset, Split split, int index);

StereoSample load_sample(const fs::path& root, std::string_view subset, Split split, int index,
                         const DatasetManifest& manifest);
StereoSample load_sample(const fs::path& root, std::string_view subset, Split split, int index);

// Writes left/right PNGs and, when present, the ground truth as TIFF.
void save_sample(const fs::path& root, const StereoSample& s);

// ---------------------------------------------------------------------------
// Preprocessing

struct CropWindow {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

StereoSample crop(const StereoSample& s, const CropWindow& window);
// Uniformly chosen window, identical for left, right and ground truth.
CropWindow random_crop_window(int width, int height, int crop_h, int crop_w, std::uint64_t seed);
StereoSample crop_random(const StereoSample& s, int crop_h, int crop_w, std::uint64_t seed);

// Zero padding on the top and right; content ends up bottom-left. Padded
// ground truth is invalid (0).
StereoSample pad_to(const StereoSample& s, int target_h, int target_w);
StereoSample unpad(const StereoSample& s, int orig_h, int orig_w);

template <typename T>
Image<T> pad_top_right(const Image<T>& img, int target_h, int target_w);
template <typename T>
Image<T> unpad_top_right(const Image<T>& img, int orig_h, int orig_w);
DisparityMap unpad_top_right(const DisparityMap& d, int orig_h, int orig_w);

struct ChannelStats {
  std::array<double, 3> means{};
  std::array<double, 3> stds{};  // population standard deviation
};

ChannelStats channel_stats(const RgbImage& img);

// out[c] = (in[c] - means[c]) / stds[c]
FloatImage normalize_colors(const RgbImage& img, const std::array<double, 3>& means,
                            const std::array<double, 3>& stds);

}  // namespace stereogt
