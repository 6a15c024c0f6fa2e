#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "stereogt/geometry.hpp"
#include "stereogt/image.hpp"

namespace stereogt {

// Rectified stereo pair baseline (mm) and focal length (px).
struct StereoGeometry {
  double baseline_mm = 0.0;
  double focal_px = 0.0;

  double bf() const noexcept { return baseline_mm * focal_px; }
};

void validate(const StereoGeometry& geom);

double depth_to_disparity(double depth_mm, const StereoGeometry& geom);
double disparity_to_depth(double disparity_px, const StereoGeometry& geom);

struct Registration {
  DisparityMap disparity;
  std::size_t source_valid = 0;  // valid input depth pixels
  std::size_t hits = 0;          // of those, how many landed inside the output
  std::optional<std::string> warning;

  double hit_ratio() const noexcept {
    return source_valid == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(source_valid);
  }
};

// Maps every valid depth pixel into the stereo-left view: backproject with
// k_mech, apply the rig, project with k_zed, round to the nearest pixel and
// store b*f/Z of the transformed point. Collisions keep the smallest Z.
// Unhit pixels stay 0. Parallel over input rows; the output does not depend
// on the number of workers.
Registration register_depth(const DepthMap& depth, const RigTransform& rig,
                            const Intrinsics& k_mech, const Intrinsics& k_zed,
                            const StereoGeometry& geom, int out_width, int out_height);

namespace serial {
// Single-threaded reference of register_depth, kept for testing and benchmarks.
Registration register_depth(const DepthMap& depth, const RigTransform& rig,
                            const Intrinsics& k_mech, const Intrinsics& k_zed,
                            const StereoGeometry& geom, int out_width, int out_height);
}  // namespace serial

// Fraction of valid pixels.
double density(const DisparityMap& d);

}  // namespace stereogt
