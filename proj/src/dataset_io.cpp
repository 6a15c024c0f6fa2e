#include "stereogt/dataset_io.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <random>
#include <sstream>

#include "stereogt/error.hpp"

namespace stereogt {

namespace {

// ---------------------------------------------------------------------------
// libpng plumbing. libpng reports errors with longjmp, so everything it may
// jump over lives in PngBuffer owned by the caller.

struct PngBuffer {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<std::uint8_t> bytes;
  std::vector<png_bytep> rows;
  char message[256] = {0};
};

void png_error_fn(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<PngBuffer*>(png_get_error_ptr(png));
  std::snprintf(buf->message, sizeof(buf->message), "%s", msg);
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const fs::path& path, const char* mode) {
  FilePtr fp(std::fopen(path.c_str(), mode), &std::fclose);
  if (!fp) {
    const bool reading = mode[0] == 'r';
    throw Error(reading && !fs::exists(path) ? ErrorCode::kNotFound : ErrorCode::kIo,
                std::string(reading ? "cannot open " : "cannot write ") + path.string());
  }
  return fp;
}

enum class PngRead { kRaw, kRgb8 };

bool png_read_impl(std::FILE* fp, PngBuffer& buf, PngRead mode) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &buf, png_error_fn, png_warning_fn);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (mode == PngRead::kRgb8) {
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
    if (png_get_bit_depth(png, info) < 8) png_set_packing(png);
    if (png_get_bit_depth(png, info) == 16) png_set_strip_16(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
  } else if (png_get_bit_depth(png, info) == 16) {
    png_set_swap(png);  // host order for 16-bit samples
  }
  png_read_update_info(png, info);
  buf.width = static_cast<int>(png_get_image_width(png, info));
  buf.height = static_cast<int>(png_get_image_height(png, info));
  buf.channels = png_get_channels(png, info);
  buf.bit_depth = png_get_bit_depth(png, info);
  if (mode == PngRead::kRaw && png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY) {
    buf.channels = -1;  // flagged for the caller
  }
  const std::size_t stride = png_get_rowbytes(png, info);
  buf.bytes.resize(stride * static_cast<std::size_t>(buf.height));
  buf.rows.resize(static_cast<std::size_t>(buf.height));
  for (int y = 0; y < buf.height; ++y) buf.rows[y] = buf.bytes.data() + stride * y;
  png_read_image(png, buf.rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

PngBuffer read_png(const fs::path& path, PngRead mode) {
  auto fp = open_file(path, "rb");
  PngBuffer buf;
  if (!png_read_impl(fp.get(), buf, mode)) {
    throw Error(ErrorCode::kFormat, path.string() + ": " + buf.message);
  }
  return buf;
}

bool png_write_impl(std::FILE* fp, PngBuffer& buf) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &buf, png_error_fn, png_warning_fn);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_init_io(png, fp);
  const int color = buf.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, buf.width, buf.height, buf.bit_depth, color, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (buf.bit_depth == 16) png_set_swap(png);
  png_write_image(png, buf.rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void write_png_buffer(const fs::path& path, PngBuffer& buf) {
  const std::size_t stride =
      static_cast<std::size_t>(buf.width) * buf.channels * (buf.bit_depth / 8);
  buf.rows.resize(static_cast<std::size_t>(buf.height));
  for (int y = 0; y < buf.height; ++y) buf.rows[y] = buf.bytes.data() + stride * y;
  auto fp = open_file(path, "wb");
  if (!png_write_impl(fp.get(), buf)) {
    throw Error(ErrorCode::kIo, path.string() + ": " + buf.message);
  }
}

// ---------------------------------------------------------------------------
// libtiff plumbing

struct TiffCloser {
  void operator()(TIFF* t) const { TIFFClose(t); }
};
using TiffPtr = std::unique_ptr<TIFF, TiffCloser>;

void silence_libtiff() {
  static const bool once = [] {
    TIFFSetWarningHandler(nullptr);
    TIFFSetErrorHandler(nullptr);
    return true;
  }();
  (void)once;
}

void write_float_tiff(const fs::path& path, const Image<float>& img) {
  silence_libtiff();
  TiffPtr tif(TIFFOpen(path.c_str(), "w"));
  if (!tif) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  TIFF* t = tif.get();
  TIFFSetField(t, TIFFTAG_IMAGEWIDTH, static_cast<std::uint32_t>(img.width()));
  TIFFSetField(t, TIFFTAG_IMAGELENGTH, static_cast<std::uint32_t>(img.height()));
  TIFFSetField(t, TIFFTAG_SAMPLESPERPIXEL, 1);
  TIFFSetField(t, TIFFTAG_BITSPERSAMPLE, 32);
  TIFFSetField(t, TIFFTAG_SAMPLEFORMAT, SAMPLEFORMAT_IEEEFP);
  TIFFSetField(t, TIFFTAG_PHOTOMETRIC, PHOTOMETRIC_MINISBLACK);
  TIFFSetField(t, TIFFTAG_PLANARCONFIG, PLANARCONFIG_CONTIG);
  TIFFSetField(t, TIFFTAG_COMPRESSION, COMPRESSION_NONE);
  TIFFSetField(t, TIFFTAG_ROWSPERSTRIP, TIFFDefaultStripSize(t, 0));
  std::vector<float> line(static_cast<std::size_t>(img.width()));
  for (int y = 0; y < img.height(); ++y) {
    std::copy_n(img.row(y), img.width(), line.begin());
    if (TIFFWriteScanline(t, line.data(), static_cast<std::uint32_t>(y), 0) < 0) {
      throw Error(ErrorCode::kIo, "failed writing " + path.string());
    }
  }
}

Image<float> read_float_tiff(const fs::path& path) {
  silence_libtiff();
  if (!fs::exists(path)) throw Error(ErrorCode::kNotFound, path.string());
  TiffPtr tif(TIFFOpen(path.c_str(), "r"));
  if (!tif) throw Error(ErrorCode::kFormat, "cannot parse TIFF " + path.string());
  TIFF* t = tif.get();
  std::uint32_t w = 0, h = 0;
  std::uint16_t spp = 1, bps = 0, fmt = SAMPLEFORMAT_UINT, planar = PLANARCONFIG_CONTIG;
  TIFFGetField(t, TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(t, TIFFTAG_IMAGELENGTH, &h);
  TIFFGetFieldDefaulted(t, TIFFTAG_SAMPLESPERPIXEL, &spp);
  TIFFGetFieldDefaulted(t, TIFFTAG_BITSPERSAMPLE, &bps);
  TIFFGetFieldDefaulted(t, TIFFTAG_SAMPLEFORMAT, &fmt);
  TIFFGetFieldDefaulted(t, TIFFTAG_PLANARCONFIG, &planar);
  if (spp != 1 || bps != 32 || fmt != SAMPLEFORMAT_IEEEFP) {
    throw Error(ErrorCode::kFormat, path.string() + ": expected single-channel 32-bit float TIFF (got " +
                                        std::to_string(spp) + " channel(s), " + std::to_string(bps) +
                                        " bit)");
  }
  if (TIFFIsTiled(t)) throw Error(ErrorCode::kFormat, path.string() + ": tiled TIFF not supported");
  Image<float> img(static_cast<int>(w), static_cast<int>(h));
  for (std::uint32_t y = 0; y < h; ++y) {
    if (TIFFReadScanline(t, img.row(static_cast<int>(y)), y, 0) < 0) {
      throw Error(ErrorCode::kFormat, "failed reading " + path.string());
    }
  }
  return img;
}

enum class FileKind { kPng, kTiff, kUnknown };

FileKind sniff(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fs::exists(path) ? ErrorCode::kIo : ErrorCode::kNotFound, path.string());
  unsigned char sig[8] = {0};
  in.read(reinterpret_cast<char*>(sig), sizeof(sig));
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (in.gcount() == 8 && std::memcmp(sig, kPngSig, 8) == 0) return FileKind::kPng;
  if (in.gcount() >= 4 && ((sig[0] == 'I' && sig[1] == 'I' && sig[2] == 42 && sig[3] == 0) ||
                           (sig[0] == 'M' && sig[1] == 'M' && sig[2] == 0 && sig[3] == 42))) {
    return FileKind::kTiff;
  }
  return FileKind::kUnknown;
}

}  // namespace

// ---------------------------------------------------------------------------

void write_disparity_subpixel(const fs::path& path, const DisparityMap& d) {
  write_float_tiff(path, d);
}

DisparityMap quantize_disparity(const DisparityMap& d, QuantizationReport* report) {
  DisparityMap out(d.width(), d.height());
  QuantizationReport rep;
  auto src = d.data();
  auto dst = out.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const float v = src[i];
    if (!DisparityMap::is_valid_value(v)) continue;
    ++rep.valid_in;
    const double r = std::floor(static_cast<double>(v) + 0.5);
    if (r >= 256.0) {
      throw Error(ErrorCode::kRangeOverflow,
                  "disparity " + std::to_string(v) + " does not fit an 8-bit PNG");
    }
    if (r == 0.0) {
      ++rep.lost_to_zero;
      continue;
    }
    dst[i] = static_cast<float>(r);
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(r - static_cast<double>(v)));
  }
  if (report != nullptr) *report = rep;
  return out;
}

QuantizationReport write_disparity_pixel(const fs::path& path, const DisparityMap& d) {
  QuantizationReport rep;
  const DisparityMap q = quantize_disparity(d, &rep);
  PngBuffer buf;
  buf.width = q.width();
  buf.height = q.height();
  buf.channels = 1;
  buf.bit_depth = 8;
  buf.bytes.resize(q.pixel_count());
  auto src = q.data();
  for (std::size_t i = 0; i < src.size(); ++i) buf.bytes[i] = static_cast<std::uint8_t>(src[i]);
  write_png_buffer(path, buf);
  return rep;
}

DisparityMap read_disparity(const fs::path& path) {
  switch (sniff(path)) {
    case FileKind::kTiff:
      return DisparityMap(read_float_tiff(path));
    case FileKind::kPng: {
      const PngBuffer buf = read_png(path, PngRead::kRaw);
      if (buf.channels != 1 || buf.bit_depth != 8) {
        throw Error(ErrorCode::kFormat,
                    path.string() + ": disparity PNG must be 8-bit single channel (bit depth " +
                        std::to_string(buf.bit_depth) + ")");
      }
      DisparityMap d(buf.width, buf.height);
      auto dst = d.data();
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = static_cast<float>(buf.bytes[i]);
      return d;
    }
    case FileKind::kUnknown:
      break;
  }
  throw Error(ErrorCode::kFormat, path.string() + ": neither PNG nor TIFF");
}

DepthMap read_depth(const fs::path& path) {
  switch (sniff(path)) {
    case FileKind::kTiff:
      return DepthMap(read_float_tiff(path));
    case FileKind::kPng: {
      const PngBuffer buf = read_png(path, PngRead::kRaw);
      if (buf.channels != 1 || buf.bit_depth != 16) {
        throw Error(ErrorCode::kFormat, path.string() + ": depth PNG must be 16-bit single channel");
      }
      DepthMap depth(buf.width, buf.height);
      auto dst = depth.data();
      for (std::size_t i = 0; i < dst.size(); ++i) {
        std::uint16_t v = 0;
        std::memcpy(&v, buf.bytes.data() + 2 * i, 2);
        dst[i] = static_cast<float>(v);
      }
      return depth;
    }
    case FileKind::kUnknown:
      break;
  }
  throw Error(ErrorCode::kFormat, path.string() + ": neither PNG nor TIFF");
}

void write_depth_png16(const fs::path& path, const DepthMap& depth) {
  PngBuffer buf;
  buf.width = depth.width();
  buf.height = depth.height();
  buf.channels = 1;
  buf.bit_depth = 16;
  buf.bytes.resize(depth.pixel_count() * 2);
  auto src = depth.data();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const float z = src[i];
    std::uint16_t v = 0;
    if (DepthMap::is_valid_value(z)) {
      const double r = std::floor(static_cast<double>(z) + 0.5);
      if (r > 65535.0) throw Error(ErrorCode::kRangeOverflow, "depth does not fit 16 bits");
      v = static_cast<std::uint16_t>(r);
    }
    std::memcpy(buf.bytes.data() + 2 * i, &v, 2);
  }
  write_png_buffer(path, buf);
}

void write_depth_tiff(const fs::path& path, const DepthMap& depth) { write_float_tiff(path, depth); }

RgbImage read_rgb(const fs::path& path) {
  if (sniff(path) != FileKind::kPng) throw Error(ErrorCode::kFormat, path.string() + ": expected PNG");
  PngBuffer buf = read_png(path, PngRead::kRgb8);
  if (buf.channels != 3 || buf.bit_depth != 8) {
    throw Error(ErrorCode::kFormat, path.string() + ": could not convert to 8-bit RGB");
  }
  RgbImage img(buf.width, buf.height, 3);
  std::copy(buf.bytes.begin(), buf.bytes.end(), img.data().begin());
  return img;
}

void write_png(const fs::path& path, const Image<std::uint8_t>& img) {
  if (img.channels() != 1 && img.channels() != 3) {
    throw Error(ErrorCode::kFormat, "PNG writer supports 1 or 3 channels");
  }
  PngBuffer buf;
  buf.width = img.width();
  buf.height = img.height();
  buf.channels = img.channels();
  buf.bit_depth = 8;
  buf.bytes.assign(img.data().begin(), img.data().end());
  write_png_buffer(path, buf);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "train";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "validation" || s == "val") return Split::kValidation;
  if (s == "test") return Split::kTest;
  throw Error(ErrorCode::kInput, "unknown split '" + std::string(s) + "'");
}

int SubsetInfo::count(Split s) const noexcept {
  switch (s) {
    case Split::kTrain: return train;
    case Split::kValidation: return validation;
    case Split::kTest: return test;
  }
  return 0;
}

const SubsetInfo& DatasetManifest::find(std::string_view subset) const {
  for (const auto& s : subsets) {
    if (s.name == subset) return s;
  }
  throw Error(ErrorCode::kNotFound, "subset '" + std::string(subset) + "' not in manifest");
}

int DatasetManifest::total(Split s) const noexcept {
  int n = 0;
  for (const auto& sub : subsets) n += sub.count(s);
  return n;
}

int DatasetManifest::total() const noexcept {
  int n = 0;
  for (const auto& sub : subsets) n += sub.total();
  return n;
}

DatasetManifest default_manifest() {
  return {{
      {"spinach", 160, 40, 100, 1046, 606},
      {"tomato", 80, 20, 50, 1040, 603},
      {"pepper", 150, 30, 32, 1024, 571},
      {"pumpkin", 80, 20, 50, 1024, 571},
  }};
}

DatasetManifest parse_manifest(std::string_view text) {
  DatasetManifest m;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    SubsetInfo s;
    std::string res;
    if (!(ls >> s.name)) continue;
    char x = 0;
    std::istringstream rs;
    if (!(ls >> s.train >> s.validation >> s.test >> res)) {
      throw Error(ErrorCode::kFormat, "manifest line " + std::to_string(lineno) + " is malformed");
    }
    rs.str(res);
    if (!(rs >> s.width >> x >> s.height) || x != 'x' || s.width <= 0 || s.height <= 0 ||
        s.train < 0 || s.validation < 0 || s.test < 0) {
      throw Error(ErrorCode::kFormat, "manifest line " + std::to_string(lineno) + " is invalid");
    }
    m.subsets.push_back(std::move(s));
  }
  return m;
}

std::string format_manifest(const DatasetManifest& m) {
  std::ostringstream out;
  out << "# subset train validation test WxH\n";
  for (const auto& s : m.subsets) {
    out << s.name << ' ' << s.train << ' ' << s.validation << ' ' << s.test << ' ' << s.width
        << 'x' << s.height << '\n';
  }
  return out.str();
}

DatasetManifest load_manifest(const fs::path& root) {
  const fs::path p = root / "manifest.txt";
  if (!fs::exists(p)) return default_manifest();
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

SamplePaths sample_paths(const fs::path& root, std::string_view subset, Split split, int index) {
  char name[32];
  std::snprintf(name, sizeof(name), "%06d", index);
  const fs::path base = root / std::string(subset) / std::string(to_string(split));
  return {base / "left" / (std::string(name) + ".png"), base / "right" / (std::string(name) + ".png"),
          base / "disp" / (std::string(name) + ".tiff"), base / "disp" / (std::string(name) + ".png")};
}

StereoSample load_sample(const fs::path& root, std::string_view subset, Split split, int index,
                         const DatasetManifest& manifest) {
  const SubsetInfo& info = manifest.find(subset);
  if (index < 0 || index >= info.count(split)) {
    throw Error(ErrorCode::kNotFound, std::string(subset) + "/" + std::string(to_string(split)) +
                                          " has no index " + std::to_string(index));
  }
  const SamplePaths paths = sample_paths(root, subset, split, index);
  for (const auto& p : {paths.left, paths.right}) {
    if (!fs::exists(p)) throw Error(ErrorCode::kNotFound, p.string());
  }
  StereoSample s;
  s.subset = std::string(subset);
  s.split = split;
  s.index = index;
  s.left = read_rgb(paths.left);
  s.right = read_rgb(paths.right);
  if (fs::exists(paths.disp_subpixel)) {
    s.ground_truth = read_disparity(paths.disp_subpixel);
  } else if (fs::exists(paths.disp_pixel)) {
    s.ground_truth = read_disparity(paths.disp_pixel);
  }
  auto check = [&](int w, int h, const char* what) {
    if (w != info.width || h != info.height) {
      throw Error(ErrorCode::kCorruptDataset,
                  std::string(what) + " is " + std::to_string(w) + "x" + std::to_string(h) +
                      ", manifest says " + std::to_string(info.width) + "x" +
                      std::to_string(info.height));
    }
  };
  check(s.left.width(), s.left.height(), "left image");
  check(s.right.width(), s.right.height(), "right image");
  if (s.ground_truth) check(s.ground_truth->width(), s.ground_truth->height(), "ground truth");
  return s;
}

StereoSample load_sample(const fs::path& root, std::string_view subset, Split split, int index) {
  return load_sample(root, subset, split, index, load_manifest(root));
}

void save_sample(const fs::path& root, const StereoSample& s) {
  const SamplePaths paths = sample_paths(root, s.subset, s.split, s.index);
  fs::create_directories(paths.left.parent_path());
  fs::create_directories(paths.right.parent_path());
  write_png(paths.left, s.left);
  write_png(paths.right, s.right);
  if (s.ground_truth) {
    fs::create_directories(paths.disp_subpixel.parent_path());
    write_disparity_subpixel(paths.disp_subpixel, *s.ground_truth);
  }
}

// ---------------------------------------------------------------------------

namespace {

template <typename T>
Image<T> crop_image(const Image<T>& img, const CropWindow& w) {
  Image<T> out(w.width, w.height, img.channels());
  for (int y = 0; y < w.height; ++y) {
    const T* src = img.row(w.y + y) + static_cast<std::size_t>(w.x) * img.channels();
    std::copy_n(src, static_cast<std::size_t>(w.width) * img.channels(), out.row(y));
  }
  return out;
}

void check_pair(const StereoSample& s) {
  if (s.left.width() != s.right.width() || s.left.height() != s.right.height()) {
    throw Error(ErrorCode::kDimension, "left and right views differ in size");
  }
  if (s.ground_truth &&
      (s.ground_truth->width() != s.left.width() || s.ground_truth->height() != s.left.height())) {
    throw Error(ErrorCode::kDimension, "ground truth does not match the left view");
  }
}

}  // namespace

StereoSample crop(const StereoSample& s, const CropWindow& window) {
  check_pair(s);
  if (window.width <= 0 || window.height <= 0 || window.x < 0 || window.y < 0 ||
      window.x + window.width > s.left.width() || window.y + window.height > s.left.height()) {
    throw Error(ErrorCode::kDimension, "crop window outside the sample");
  }
  StereoSample out;
  out.subset = s.subset;
  out.split = s.split;
  out.index = s.index;
  out.left = crop_image(s.left, window);
  out.right = crop_image(s.right, window);
  if (s.ground_truth) out.ground_truth = DisparityMap(crop_image<float>(*s.ground_truth, window));
  return out;
}

CropWindow random_crop_window(int width, int height, int crop_h, int crop_w, std::uint64_t seed) {
  if (crop_h <= 0 || crop_w <= 0 || crop_h > height || crop_w > width) {
    throw Error(ErrorCode::kDimension, "crop " + std::to_string(crop_h) + "x" + std::to_string(crop_w) +
                                           " does not fit " + std::to_string(height) + "x" +
                                           std::to_string(width));
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> xs(0, width - crop_w);
  std::uniform_int_distribution<int> ys(0, height - crop_h);
  CropWindow w;
  w.x = xs(rng);
  w.y = ys(rng);
  w.width = crop_w;
  w.height = crop_h;
  return w;
}

StereoSample crop_random(const StereoSample& s, int crop_h, int crop_w, std::uint64_t seed) {
  check_pair(s);
  return crop(s, random_crop_window(s.left.width(), s.left.height(), crop_h, crop_w, seed));
}

template <typename T>
Image<T> pad_top_right(const Image<T>& img, int target_h, int target_w) {
  if (img.height() > target_h || img.width() > target_w) {
    throw Error(ErrorCode::kDimension, "image larger than the padding target");
  }
  Image<T> out(target_w, target_h, img.channels(), T{});
  const int top = target_h - img.height();
  for (int y = 0; y < img.height(); ++y) {
    std::copy_n(img.row(y), static_cast<std::size_t>(img.width()) * img.channels(), out.row(top + y));
  }
  return out;
}

template <typename T>
Image<T> unpad_top_right(const Image<T>& img, int orig_h, int orig_w) {
  if (orig_h > img.height() || orig_w > img.width() || orig_h <= 0 || orig_w <= 0) {
    throw Error(ErrorCode::kDimension, "unpad size larger than the padded image");
  }
  return crop_image(img, {0, img.height() - orig_h, orig_w, orig_h});
}

template Image<std::uint8_t> pad_top_right(const Image<std::uint8_t>&, int, int);
template Image<float> pad_top_right(const Image<float>&, int, int);
template Image<std::uint8_t> unpad_top_right(const Image<std::uint8_t>&, int, int);
template Image<float> unpad_top_right(const Image<float>&, int, int);

DisparityMap unpad_top_right(const DisparityMap& d, int orig_h, int orig_w) {
  return DisparityMap(unpad_top_right<float>(d, orig_h, orig_w));
}

StereoSample pad_to(const StereoSample& s, int target_h, int target_w) {
  check_pair(s);
  StereoSample out;
  out.subset = s.subset;
  out.split = s.split;
  out.index = s.index;
  out.left = pad_top_right(s.left, target_h, target_w);
  out.right = pad_top_right(s.right, target_h, target_w);
  if (s.ground_truth) out.ground_truth = DisparityMap(pad_top_right<float>(*s.ground_truth, target_h, target_w));
  return out;
}

StereoSample unpad(const StereoSample& s, int orig_h, int orig_w) {
  check_pair(s);
  StereoSample out;
  out.subset = s.subset;
  out.split = s.split;
  out.index = s.index;
  out.left = unpad_top_right(s.left, orig_h, orig_w);
  out.right = unpad_top_right(s.right, orig_h, orig_w);
  if (s.ground_truth) out.ground_truth = unpad_top_right(*s.ground_truth, orig_h, orig_w);
  return out;
}

ChannelStats channel_stats(const RgbImage& img) {
  if (img.channels() != 3) throw Error(ErrorCode::kFormat, "expected an RGB image");
  ChannelStats st;
  const double n = static_cast<double>(img.pixel_count());
  if (n == 0) return st;
  std::array<double, 3> sum{}, sq{};
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) sum[c] += img.at(x, y, c);
    }
  }
  for (int c = 0; c < 3; ++c) st.means[c] = sum[c] / n;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const double d = img.at(x, y, c) - st.means[c];
        sq[c] += d * d;
      }
    }
  }
  for (int c = 0; c < 3; ++c) st.stds[c] = std::sqrt(sq[c] / n);
  return st;
}

FloatImage normalize_colors(const RgbImage& img, const std::array<double, 3>& means,
                            const std::array<double, 3>& stds) {
  if (img.channels() != 3) throw Error(ErrorCode::kFormat, "expected an RGB image");
  for (double s : stds) {
    if (!(s > 0.0)) throw Error(ErrorCode::kDivideByZero, "channel standard deviation must be positive");
  }
  FloatImage out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = static_cast<float>((img.at(x, y, c) - means[c]) / stds[c]);
      }
    }
  }
  return out;
}

}  // namespace stereogt
