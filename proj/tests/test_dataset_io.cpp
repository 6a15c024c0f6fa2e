#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "stereogt/dataset_io.hpp"
#include "stereogt/error.hpp"
#include "support.hpp"

namespace stereogt {
namespace {

using testing::random_disparity;
using testing::TempDir;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no stereogt::Error thrown";
  return ErrorCode::kInput;
}

RgbImage random_rgb(std::mt19937_64& rng, int w, int h) {
  RgbImage img(w, h, 3);
  std::uniform_int_distribution<int> v(0, 255);
  for (auto& p : img.data()) p = static_cast<std::uint8_t>(v(rng));
  return img;
}

bool bit_equal(const DisparityMap& a, const DisparityMap& b) {
  return a.same_shape(b) && std::memcmp(a.data().data(), b.data().data(), a.size() * sizeof(float)) == 0;
}

TEST(SubpixelTiff, KeepsValueBitExactly) {
  TempDir dir("tiff1");
  DisparityMap d(3, 2);
  d.at(1, 1) = 231.724f;
  write_disparity_subpixel(dir / "d.tiff", d);
  const DisparityMap back = read_disparity(dir / "d.tiff");
  EXPECT_EQ(back.at(1, 1), 231.724f);
  EXPECT_TRUE(bit_equal(back, d));
}

TEST(SubpixelTiff, AllZeroReadsAsInvalid) {
  TempDir dir("tiff2");
  write_disparity_subpixel(dir / "z.tiff", DisparityMap(17, 9));
  const DisparityMap back = read_disparity(dir / "z.tiff");
  for (int y = 0; y < 9; ++y) {
    for (int x = 0; x < 17; ++x) EXPECT_FALSE(back.valid(x, y));
  }
}

TEST(SubpixelTiff, RandomMapsRoundTrip) {
  TempDir dir("tiff3");
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> side(1, 40);
  for (int i = 0; i < 100; ++i) {
    DisparityMap m = random_disparity(rng, side(rng), side(rng), 0.0, 1000.0, 0.2);
    if (i % 7 == 0) m.data()[0] = std::numeric_limits<float>::quiet_NaN();
    write_disparity_subpixel(dir / "r.tiff", m);
    EXPECT_TRUE(bit_equal(read_disparity(dir / "r.tiff"), m));
  }
}

TEST(PixelPng, RoundingContract) {
  DisparityMap d(4, 1);
  d.at(0, 0) = 231.4f;
  d.at(1, 0) = 231.5f;
  d.at(2, 0) = 0.2f;
  d.at(3, 0) = 0.5f;
  QuantizationReport rep;
  const DisparityMap q = quantize_disparity(d, &rep);
  EXPECT_EQ(q.at(0, 0), 231.0f);
  EXPECT_EQ(q.at(1, 0), 232.0f);
  EXPECT_EQ(q.at(2, 0), 0.0f);
  EXPECT_EQ(q.at(3, 0), 1.0f);
  EXPECT_EQ(rep.valid_in, 4u);
  EXPECT_EQ(rep.lost_to_zero, 1u);
  EXPECT_NEAR(rep.max_abs_error, 0.5, 1e-6);
}

TEST(PixelPng, WriterReportsLostPixels) {
  TempDir dir("png0");
  DisparityMap d(2, 1);
  d.at(0, 0) = 0.2f;
  d.at(1, 0) = 7.0f;
  const QuantizationReport rep = write_disparity_pixel(dir / "d.png", d);
  EXPECT_EQ(rep.lost_to_zero, 1u);
  const DisparityMap back = read_disparity(dir / "d.png");
  EXPECT_FALSE(back.valid(0, 0));
  EXPECT_EQ(back.at(1, 0), 7.0f);
}

TEST(PixelPng, OverflowIsAnError) {
  TempDir dir("png1");
  DisparityMap d(1, 1, 255.5f);
  EXPECT_EQ(code_of([&] { write_disparity_pixel(dir / "o.png", d); }), ErrorCode::kRangeOverflow);
  DisparityMap ok(1, 1, 255.49f);
  EXPECT_NO_THROW(write_disparity_pixel(dir / "ok.png", ok));
}

TEST(PixelPng, RandomMapsWithinHalfPixel) {
  TempDir dir("png2");
  std::mt19937_64 rng(4);
  for (int i = 0; i < 50; ++i) {
    const DisparityMap m = random_disparity(rng, 33, 21, 0.0, 255.49, 0.1);
    write_disparity_pixel(dir / "m.png", m);
    const DisparityMap back = read_disparity(dir / "m.png");
    for (std::size_t k = 0; k < m.size(); ++k) {
      const float o = m.data()[k];
      const float b = back.data()[k];
      if (o >= 0.5f) {
        ASSERT_GT(b, 0.0f);  // validity preserved
        EXPECT_LE(std::abs(double(b) - o), 0.5);
      } else {
        EXPECT_EQ(b, 0.0f);
      }
    }
  }
}

TEST(ReadDisparity, RejectsOtherFormats) {
  TempDir dir("fmt");
  {
    std::ofstream f(dir / "x.tiff");
    f << "not an image";
  }
  EXPECT_EQ(code_of([&] { read_disparity(dir / "x.tiff"); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([&] { read_disparity(dir / "missing.png"); }), ErrorCode::kNotFound);
  write_png(dir / "rgb.png", RgbImage(4, 4, 3));
  EXPECT_EQ(code_of([&] { read_disparity(dir / "rgb.png"); }), ErrorCode::kFormat);
}

TEST(Depth, Png16AndTiffRoundTrip) {
  TempDir dir("depth");
  DepthMap d(5, 4);
  for (int i = 0; i < 20; ++i) d.data()[i] = i % 3 == 0 ? 0.0f : 400.0f + 17.0f * i;
  write_depth_png16(dir / "d.png", d);
  EXPECT_EQ(read_depth(dir / "d.png"), d);
  d.at(1, 1) = 612.375f;
  write_depth_tiff(dir / "d.tiff", d);
  EXPECT_EQ(read_depth(dir / "d.tiff"), d);
  DepthMap big(1, 1, 70000.0f);
  EXPECT_EQ(code_of([&] { write_depth_png16(dir / "b.png", big); }), ErrorCode::kRangeOverflow);
}

TEST(Rgb, RoundTripAndGrayPromotion) {
  TempDir dir("rgb");
  std::mt19937_64 rng(5);
  const RgbImage img = random_rgb(rng, 13, 7);
  write_png(dir / "c.png", img);
  EXPECT_EQ(read_rgb(dir / "c.png"), img);
  GrayImage g(3, 2, 1, 77);
  write_png(dir / "g.png", g);
  const RgbImage promoted = read_rgb(dir / "g.png");
  EXPECT_EQ(promoted.channels(), 3);
  EXPECT_EQ(promoted.at(2, 1, 2), 77);
}

TEST(Manifest, PlantSubsets) {
  const DatasetManifest m = default_manifest();
  const SubsetInfo& spinach = m.find("spinach");
  EXPECT_EQ(spinach.train, 160);
  EXPECT_EQ(spinach.validation, 40);
  EXPECT_EQ(spinach.test, 100);
  EXPECT_EQ(spinach.width, 1046);
  EXPECT_EQ(spinach.height, 606);
  const SubsetInfo& pepper = m.find("pepper");
  EXPECT_EQ(pepper.width, 1024);
  EXPECT_EQ(pepper.height, 571);
  EXPECT_EQ(m.find("tomato").total(), 150);
  EXPECT_EQ(m.find("pumpkin").count(Split::kTest), 50);
  EXPECT_EQ(m.total(Split::kTrain), 470);
  EXPECT_EQ(m.total(Split::kValidation), 110);
  EXPECT_EQ(m.total(Split::kTest), 232);
  EXPECT_EQ(m.total(), 812);
  EXPECT_EQ(code_of([&] { m.find("kale"); }), ErrorCode::kNotFound);
}

TEST(Manifest, TextRoundTrip) {
  const DatasetManifest m = default_manifest();
  const DatasetManifest back = parse_manifest(format_manifest(m));
  ASSERT_EQ(back.subsets.size(), 4u);
  EXPECT_EQ(back.total(), 812);
  EXPECT_EQ(back.find("tomato").width, 1040);
  EXPECT_EQ(code_of([] { parse_manifest("leaf 1 2 3 10y20\n"); }), ErrorCode::kFormat);
  EXPECT_EQ(code_of([] { parse_manifest("leaf 1 2\n"); }), ErrorCode::kFormat);
}

TEST(Split, Names) {
  for (Split s : {Split::kTrain, Split::kValidation, Split::kTest}) EXPECT_EQ(parse_split(to_string(s)), s);
  EXPECT_THROW(parse_split("dev"), Error);
}

TEST(LoadSample, ReadsLayoutAndChecksManifest) {
  TempDir dir("ds");
  std::mt19937_64 rng(6);
  DatasetManifest m;
  m.subsets.push_back({"leaf", 2, 1, 1, 12, 8});
  StereoSample s;
  s.left = random_rgb(rng, 12, 8);
  s.right = random_rgb(rng, 12, 8);
  s.ground_truth = random_disparity(rng, 12, 8, 1.0, 50.0, 0.1);
  s.subset = "leaf";
  s.split = Split::kTrain;
  s.index = 1;
  save_sample(dir.path(), s);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "leaf/train/left/000001.png"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "leaf/train/disp/000001.tiff"));

  const StereoSample back = load_sample(dir.path(), "leaf", Split::kTrain, 1, m);
  EXPECT_EQ(back.left, s.left);
  EXPECT_EQ(back.right, s.right);
  ASSERT_TRUE(back.ground_truth);
  EXPECT_TRUE(bit_equal(*back.ground_truth, *s.ground_truth));

  EXPECT_EQ(code_of([&] { load_sample(dir.path(), "leaf", Split::kTrain, 2, m); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { load_sample(dir.path(), "leaf", Split::kTrain, 0, m); }), ErrorCode::kNotFound);

  DatasetManifest wrong = m;
  wrong.subsets[0].width = 13;
  EXPECT_EQ(code_of([&] { load_sample(dir.path(), "leaf", Split::kTrain, 1, wrong); }),
            ErrorCode::kCorruptDataset);

  {
    std::ofstream f(dir / "manifest.txt");
    f << format_manifest(m);
  }
  EXPECT_EQ(load_sample(dir.path(), "leaf", Split::kTrain, 1).left, s.left);
}

TEST(LoadSample, DefaultManifestIndexRange) {
  TempDir dir("ds2");
  EXPECT_EQ(code_of([&] { load_sample(dir.path(), "spinach", Split::kTrain, 160); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { load_sample(dir.path(), "spinach", Split::kTrain, -1); }), ErrorCode::kNotFound);
}

StereoSample sample_of(std::mt19937_64& rng, int w, int h) {
  StereoSample s;
  s.left = random_rgb(rng, w, h);
  s.right = random_rgb(rng, w, h);
  s.ground_truth = random_disparity(rng, w, h, 1.0, 200.0, 0.1);
  return s;
}

TEST(Crop, FullSizeIsIdentity) {
  std::mt19937_64 rng(7);
  const StereoSample s = sample_of(rng, 40, 30);
  const StereoSample c = crop_random(s, 30, 40, 99);
  EXPECT_EQ(c.left, s.left);
  EXPECT_EQ(c.right, s.right);
  EXPECT_EQ(*c.ground_truth, *s.ground_truth);
}

TEST(Crop, SeededAndAligned) {
  std::mt19937_64 rng(8);
  const StereoSample s = sample_of(rng, 64, 48);
  const StereoSample a = crop_random(s, 16, 32, 1234);
  const StereoSample b = crop_random(s, 16, 32, 1234);
  EXPECT_EQ(a.left, b.left);
  EXPECT_EQ(a.right, b.right);
  EXPECT_EQ(*a.ground_truth, *b.ground_truth);
  const CropWindow w = random_crop_window(64, 48, 16, 32, 1234);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 32; ++x) {
      EXPECT_EQ(a.left.at(x, y, 1), s.left.at(w.x + x, w.y + y, 1));
      EXPECT_EQ(a.right.at(x, y, 2), s.right.at(w.x + x, w.y + y, 2));
      EXPECT_EQ(a.ground_truth->at(x, y), s.ground_truth->at(w.x + x, w.y + y));
    }
  }
}

TEST(Crop, WindowsStayInBounds) {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> side(1, 1100);
  bool moved = false;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int w = std::max(512, side(rng)), h = std::max(256, side(rng));
    const CropWindow c = random_crop_window(w, h, 256, 512, seed);
    EXPECT_EQ(c.width, 512);
    EXPECT_EQ(c.height, 256);
    EXPECT_GE(c.x, 0);
    EXPECT_GE(c.y, 0);
    EXPECT_LE(c.x + c.width, w);
    EXPECT_LE(c.y + c.height, h);
    moved = moved || c.x > 0;
  }
  EXPECT_TRUE(moved);
  EXPECT_THROW(random_crop_window(100, 100, 256, 512, 1), Error);
}

TEST(Pad, SpinachToNetworkSize) {
  std::mt19937_64 rng(10);
  const StereoSample s = sample_of(rng, 1046, 606);
  const StereoSample p = pad_to(s, 608, 1056);
  EXPECT_EQ(p.left.width(), 1056);
  EXPECT_EQ(p.left.height(), 608);
  // two zero rows on top, ten zero columns on the right
  for (int x = 0; x < 1056; ++x) {
    for (int y = 0; y < 2; ++y) {
      EXPECT_EQ(p.left.at(x, y, 0), 0);
      EXPECT_EQ(p.ground_truth->at(x, y), 0.0f);
    }
  }
  for (int y = 0; y < 608; ++y) {
    for (int x = 1046; x < 1056; ++x) {
      EXPECT_EQ(p.right.at(x, y, 2), 0);
      EXPECT_FALSE(p.ground_truth->valid(x, y));
    }
  }
  EXPECT_EQ(p.left.at(0, 2, 0), s.left.at(0, 0, 0));
  EXPECT_EQ(p.ground_truth->at(1045, 607), s.ground_truth->at(1045, 605));

  const StereoSample u = unpad(p, 606, 1046);
  EXPECT_EQ(u.left, s.left);
  EXPECT_EQ(u.right, s.right);
  EXPECT_EQ(*u.ground_truth, *s.ground_truth);
}

TEST(Pad, TargetSizeIsIdentity) {
  std::mt19937_64 rng(11);
  const StereoSample s = sample_of(rng, 20, 10);
  const StereoSample p = pad_to(s, 10, 20);
  EXPECT_EQ(p.left, s.left);
  EXPECT_EQ(*p.ground_truth, *s.ground_truth);
  EXPECT_THROW(pad_to(s, 9, 20), Error);
  const DisparityMap d = unpad_top_right(*s.ground_truth, 10, 20);
  EXPECT_EQ(d, *s.ground_truth);
}

TEST(NormalizeColors, SelfStatisticsGiveZeroMeanUnitStd) {
  std::mt19937_64 rng(12);
  const RgbImage img = random_rgb(rng, 50, 40);
  const ChannelStats st = channel_stats(img);
  const FloatImage n = normalize_colors(img, st.means, st.stds);
  for (int c = 0; c < 3; ++c) {
    double s = 0.0, s2 = 0.0;
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 50; ++x) s += n.at(x, y, c);
    }
    const double mean = s / 2000.0;
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 50; ++x) s2 += (n.at(x, y, c) - mean) * (n.at(x, y, c) - mean);
    }
    EXPECT_NEAR(mean, 0.0, 1e-6);
    EXPECT_NEAR(std::sqrt(s2 / 2000.0), 1.0, 1e-6);
  }
}

TEST(NormalizeColors, IdentityAndInverse) {
  std::mt19937_64 rng(13);
  const RgbImage img = random_rgb(rng, 9, 7);
  const FloatImage same = normalize_colors(img, {0, 0, 0}, {1, 1, 1});
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(same.data()[i], float(img.data()[i]));
  const std::array<double, 3> means{123.675, 116.28, 103.53}, stds{58.395, 57.12, 57.375};
  const FloatImage n = normalize_colors(img, means, stds);
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 9; ++x) {
      for (int c = 0; c < 3; ++c) {
        EXPECT_NEAR(n.at(x, y, c) * stds[c] + means[c], img.at(x, y, c), 1e-4);
      }
    }
  }
  EXPECT_EQ(code_of([&] { normalize_colors(img, means, {1, 0, 1}); }), ErrorCode::kDivideByZero);
}

}  // namespace
}  // namespace stereogt
