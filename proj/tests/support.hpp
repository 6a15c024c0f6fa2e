#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "stereogt/dataset_io.hpp"
#include "stereogt/geometry.hpp"
#include "stereogt/image.hpp"

namespace stereogt::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("stereogt_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const noexcept { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng, double max_angle) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> a(-max_angle, max_angle);
  Eigen::Vector3d axis(n(rng), n(rng), n(rng));
  if (axis.norm() < 1e-6) axis = Eigen::Vector3d::UnitZ();
  return axis_angle(axis, a(rng));
}

inline RigTransform random_rig(std::mt19937_64& rng, double max_angle, double max_t) {
  std::uniform_real_distribution<double> u(-max_t, max_t);
  RigTransform r;
  r.R = random_rotation(rng, max_angle);
  r.t = Eigen::Vector3d(u(rng), u(rng), u(rng));
  return r;
}

inline DisparityMap random_disparity(std::mt19937_64& rng, int w, int h, double lo, double hi,
                                     double invalid_fraction) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<float> d(static_cast<float>(lo), static_cast<float>(hi));
  DisparityMap m(w, h);
  for (auto& v : m.data()) v = u(rng) < invalid_fraction ? 0.0f : d(rng);
  return m;
}

// Ground truth restricted to x >= left_margin, and a `border` band elsewhere.
inline DisparityMap interior(const DisparityMap& gt, int left_margin, int border) {
  DisparityMap out(gt.width(), gt.height());
  for (int y = border; y < gt.height() - border; ++y) {
    for (int x = left_margin; x < gt.width() - border; ++x) out.at(x, y) = gt.at(x, y);
  }
  return out;
}

}  // namespace stereogt::testing
