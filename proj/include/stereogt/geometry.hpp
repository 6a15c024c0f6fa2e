#pragma once

#include <span>

#include <Eigen/Core>

namespace stereogt {

// Pinhole intrinsics (pixels). No skew, no distortion.
struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;

  bool operator==(const Intrinsics&) const = default;
};

// World -> camera rigid transform; translation in millimetres.
struct Extrinsics {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();
};

// Depth-camera frame -> stereo-left frame; translation in millimetres.
struct RigTransform {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  static RigTransform identity() { return {}; }
  RigTransform inverse() const;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

inline constexpr double kRotationTolerance = 1e-9;

bool is_rotation(const Eigen::Matrix3d& R, double tol = kRotationTolerance);

// Throws kInvalidCalibration for non-positive focal lengths or principal
// points outside [0, 4 * extent] when an image extent is given.
void validate(const Intrinsics& k, int width = 0, int height = 0);
void validate(const Extrinsics& e);
void validate(const RigTransform& rig);

// R = R_zed * R_mech^-1, t = t_zed - R * t_mech.
RigTransform chain_extrinsics(const Extrinsics& mech, const Extrinsics& zed);

// Arithmetic mean of translations and sign-aligned quaternion (chordal) mean
// of rotations. The result does not depend on the order of the inputs.
RigTransform average_rig(std::span<const RigTransform> transforms);

Point3 backproject(const Intrinsics& k, const Pixel& pix, double depth_mm);
Point3 transform_point(const RigTransform& rig, const Point3& p);
Pixel project(const Intrinsics& k, const Point3& p);

// Rotation of `angle` radians about a (not necessarily unit) axis.
Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle);
double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b);

}  // namespace stereogt
