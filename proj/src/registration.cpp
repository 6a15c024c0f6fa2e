#include "stereogt/registration.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "stereogt/error.hpp"

namespace stereogt {

void validate(const StereoGeometry& geom) {
  if (!(geom.baseline_mm > 0.0) || !(geom.focal_px > 0.0) || !std::isfinite(geom.bf())) {
    throw Error(ErrorCode::kInvalidCalibration, "stereo baseline and focal length must be positive");
  }
}

double depth_to_disparity(double depth_mm, const StereoGeometry& geom) {
  if (!(depth_mm > 0.0) || !std::isfinite(depth_mm)) {
    throw Error(ErrorCode::kInvalidDepth, "depth must be positive, got " + std::to_string(depth_mm));
  }
  return geom.bf() / depth_mm;
}

double disparity_to_depth(double disparity_px, const StereoGeometry& geom) {
  if (!(disparity_px > 0.0) || !std::isfinite(disparity_px)) {
    throw Error(ErrorCode::kInvalidDisparity,
                "disparity must be positive, got " + std::to_string(disparity_px));
  }
  return geom.bf() / disparity_px;
}

namespace {

constexpr std::uint64_t kNoHit = std::numeric_limits<std::uint64_t>::max();

void check_inputs(const DepthMap& depth, const RigTransform& rig, const Intrinsics& k_mech,
                  const Intrinsics& k_zed, const StereoGeometry& geom, int out_width,
                  int out_height) {
  if (out_width <= 0 || out_height <= 0) {
    throw Error(ErrorCode::kDimension, "output dimensions must be positive");
  }
  if (depth.empty()) throw Error(ErrorCode::kInput, "empty depth map");
  validate(rig);
  validate(k_mech);
  validate(k_zed);
  validate(geom);
}

// Target pixel index and transformed depth for one source pixel; false when
// the point is behind the stereo camera or falls outside the output.
bool map_pixel(int x, int y, double z_mech, const RigTransform& rig, const Intrinsics& k_mech,
               const Intrinsics& k_zed, int out_width, int out_height, std::int64_t& target,
               double& z_zed) {
  const Point3 p_mech = backproject(k_mech, {static_cast<double>(x), static_cast<double>(y)}, z_mech);
  const Point3 p_zed = transform_point(rig, p_mech);
  if (!(p_zed.z > 0.0)) return false;
  const Pixel pix = project(k_zed, p_zed);
  const double u = std::floor(pix.u + 0.5);
  const double v = std::floor(pix.v + 0.5);
  if (!(u >= 0.0 && v >= 0.0 && u < out_width && v < out_height)) return false;
  target = static_cast<std::int64_t>(v) * out_width + static_cast<std::int64_t>(u);
  z_zed = p_zed.z;
  return true;
}

Registration finish(std::vector<std::uint64_t>& zbuf, double bf, int out_width, int out_height,
                    std::size_t source_valid, std::size_t hits) {
  Registration r;
  r.disparity = DisparityMap(out_width, out_height);
  auto out = r.disparity.data();
  const auto n = static_cast<std::int64_t>(zbuf.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    if (zbuf[i] != kNoHit) out[i] = static_cast<float>(bf / std::bit_cast<double>(zbuf[i]));
  }
  r.source_valid = source_valid;
  r.hits = hits;
  if (source_valid > 0 && hits == 0) {
    r.warning = "empty registration: no depth pixel projected inside the output (hit ratio 0)";
  }
  return r;
}

}  // namespace

Registration register_depth(const DepthMap& depth, const RigTransform& rig,
                            const Intrinsics& k_mech, const Intrinsics& k_zed,
                            const StereoGeometry& geom, int out_width, int out_height) {
  check_inputs(depth, rig, k_mech, k_zed, geom, out_width, out_height);

  // Positive doubles order like their bit patterns, so an integer atomic min
  // on the bits is a z-buffer whose result is independent of visiting order.
  std::vector<std::uint64_t> zbuf(static_cast<std::size_t>(out_width) * out_height, kNoHit);
  std::size_t source_valid = 0;
  std::size_t hits = 0;
  const int h = depth.height();
  const int w = depth.width();

#pragma omp parallel for schedule(static) reduction(+ : source_valid, hits)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float z = depth.at(x, y);
      if (!DepthMap::is_valid_value(z)) continue;
      ++source_valid;
      std::int64_t target = 0;
      double z_zed = 0.0;
      if (!map_pixel(x, y, z, rig, k_mech, k_zed, out_width, out_height, target, z_zed)) continue;
      ++hits;
      const std::uint64_t bits = std::bit_cast<std::uint64_t>(z_zed);
      std::atomic_ref<std::uint64_t> slot(zbuf[static_cast<std::size_t>(target)]);
      std::uint64_t cur = slot.load(std::memory_order_relaxed);
      while (bits < cur && !slot.compare_exchange_weak(cur, bits, std::memory_order_relaxed)) {
      }
    }
  }
  return finish(zbuf, geom.bf(), out_width, out_height, source_valid, hits);
}

namespace serial {

Registration register_depth(const DepthMap& depth, const RigTransform& rig,
                            const Intrinsics& k_mech, const Intrinsics& k_zed,
                            const StereoGeometry& geom, int out_width, int out_height) {
  check_inputs(depth, rig, k_mech, k_zed, geom, out_width, out_height);
  std::vector<std::uint64_t> zbuf(static_cast<std::size_t>(out_width) * out_height, kNoHit);
  std::size_t source_valid = 0;
  std::size_t hits = 0;
  for (int y = 0; y < depth.height(); ++y) {
    for (int x = 0; x < depth.width(); ++x) {
      const float z = depth.at(x, y);
      if (!DepthMap::is_valid_value(z)) continue;
      ++source_valid;
      std::int64_t target = 0;
      double z_zed = 0.0;
      if (!map_pixel(x, y, z, rig, k_mech, k_zed, out_width, out_height, target, z_zed)) continue;
      ++hits;
      auto& slot = zbuf[static_cast<std::size_t>(target)];
      slot = std::min(slot, std::bit_cast<std::uint64_t>(z_zed));
    }
  }
  return finish(zbuf, geom.bf(), out_width, out_height, source_valid, hits);
}

}  // namespace serial

double density(const DisparityMap& d) {
  if (d.pixel_count() == 0) return 0.0;
  std::size_t valid = 0;
  for (float v : d.data()) valid += DisparityMap::is_valid_value(v) ? 1 : 0;
  return static_cast<double>(valid) / static_cast<double>(d.pixel_count());
}

}  // namespace stereogt
