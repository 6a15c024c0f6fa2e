#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "stereogt/dataset_io.hpp"
#include "stereogt/geometry.hpp"
#include "stereogt/registration.hpp"

namespace stereogt {

enum class FieldKind { kConstant, kRamp, kTwoPlane, kBimodal };

std::string_view to_string(FieldKind k);
FieldKind parse_field_kind(std::string_view s);

// Synthetic scene with an analytic left-view disparity field.
//   constant  d = disparity
//   ramp      d = disparity + ramp_dx * x + ramp_dy * y
//   two-plane far plane at `disparity`, near rectangle over the central
//             half of the image at `near_disparity`
//   bimodal   ground ramp (as `ramp`) plus dome-shaped leaves around
//             `near_disparity`
struct SceneSpec {
  int width = 256;
  int height = 256;
  FieldKind field = FieldKind::kConstant;
  double disparity = 40.0;
  double near_disparity = 60.0;
  double ramp_dx = 0.0;
  double ramp_dy = 0.0;
  int leaf_count = 6;
  double dot_density = 0.5;
  double background_density = -1.0;  // < 0: same as dot_density
  std::uint64_t seed = 1;
  double baseline_mm = 120.0;
  double focal_px = 1050.0;
  double d_max = 256.0;
};

void validate(const SceneSpec& spec);

struct FieldSample {
  double disparity = 0.0;
  int surface = 0;  // 0 background, 1 foreground
};

// Disparity field value at left-view pixel (x, y).
FieldSample sample_field(const SceneSpec& spec, int x, int y);

// Left: random-dot texture. Right: the left view reverse-warped through the
// field with linear interpolation; regions no left pixel reaches get fresh
// texture. Ground truth is the field, zeroed where the left pixel is hidden
// in (or outside) the right view.
StereoSample synth_stereo(const SceneSpec& spec);

struct DepthRigScene {
  DepthMap depth;  // depth-camera frame, millimetres
  Intrinsics k_mech;
  Intrinsics k_zed;
  StereoGeometry geom;
  RigTransform rig;
  DisparityMap expected;  // stereo-left frame
};

// Depth of the field seen by a depth camera sharing the scene's pixel grid,
// plus the disparity the stereo-left view should receive through `rig`.
DepthRigScene synth_depth_rig(const SceneSpec& spec, const RigTransform& rig);

// Brute-force per-pixel registration written without the geometry module:
// explicit matrix arithmetic, nearest-pixel rounding, min-depth wins.
DisparityMap reference_register(const DepthMap& depth, const RigTransform& rig, const Intrinsics& k_mech,
                                const Intrinsics& k_zed, const StereoGeometry& geom, int out_width,
                                int out_height);

// key = value text; unknown keys are a kSpec error.
SceneSpec parse_scene_spec(std::string_view text);
SceneSpec read_scene_spec(const std::filesystem::path& path);
std::string format_scene_spec(const SceneSpec& spec);

}  // namespace stereogt
