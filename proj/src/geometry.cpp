#include "stereogt/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Geometry>

#include "stereogt/error.hpp"

namespace stereogt {

RigTransform RigTransform::inverse() const {
  RigTransform inv;
  inv.R = R.transpose();
  inv.t = -(inv.R * t);
  return inv;
}

bool is_rotation(const Eigen::Matrix3d& R, double tol) {
  if (!R.allFinite()) return false;
  const Eigen::Matrix3d gram = R.transpose() * R;
  if ((gram - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(R.determinant() - 1.0) <= tol;
}

void validate(const Intrinsics& k, int width, int height) {
  if (!(k.fx > 0.0) || !(k.fy > 0.0) || !std::isfinite(k.fx) || !std::isfinite(k.fy)) {
    throw Error(ErrorCode::kInvalidCalibration, "focal lengths must be positive");
  }
  if (!std::isfinite(k.cx) || !std::isfinite(k.cy)) {
    throw Error(ErrorCode::kInvalidCalibration, "principal point must be finite");
  }
  if (width > 0 && (k.cx < 0.0 || k.cx > 4.0 * width)) {
    throw Error(ErrorCode::kInvalidCalibration, "principal point x outside image sanity bound");
  }
  if (height > 0 && (k.cy < 0.0 || k.cy > 4.0 * height)) {
    throw Error(ErrorCode::kInvalidCalibration, "principal point y outside image sanity bound");
  }
}

void validate(const Extrinsics& e) {
  if (!is_rotation(e.R)) throw Error(ErrorCode::kInvalidCalibration, "extrinsic R is not a rotation");
  if (!e.t.allFinite()) throw Error(ErrorCode::kInvalidCalibration, "extrinsic t is not finite");
}

void validate(const RigTransform& rig) {
  if (!is_rotation(rig.R)) throw Error(ErrorCode::kInvalidCalibration, "rig R is not a rotation");
  if (!rig.t.allFinite()) throw Error(ErrorCode::kInvalidCalibration, "rig t is not finite");
}

RigTransform chain_extrinsics(const Extrinsics& mech, const Extrinsics& zed) {
  validate(mech);
  validate(zed);
  // R_mech^-1 == R_mech^T for a rotation
  RigTransform rig;
  rig.R = zed.R * mech.R.transpose();
  rig.t = zed.t - rig.R * mech.t;
  return rig;
}

namespace {

struct RigKey {
  std::array<double, 4> q;  // w x y z, canonical sign (w >= 0)
  Eigen::Vector3d t;
};

std::array<double, 4> canonical_quaternion(const Eigen::Matrix3d& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  std::array<double, 4> c{q.w(), q.x(), q.y(), q.z()};
  // first non-zero component positive
  for (double v : c) {
    if (v != 0.0) {
      if (v < 0.0) {
        for (double& s : c) s = -s;
      }
      break;
    }
  }
  return c;
}

double dot4(const std::array<double, 4>& a, const std::array<double, 4>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

}  // namespace

RigTransform average_rig(std::span<const RigTransform> transforms) {
  if (transforms.empty()) throw Error(ErrorCode::kEmptyInput, "no transforms to average");
  for (const auto& t : transforms) validate(t);
  if (transforms.size() == 1) return transforms.front();

  std::vector<RigKey> keys;
  keys.reserve(transforms.size());
  for (const auto& t : transforms) keys.push_back({canonical_quaternion(t.R), t.t});

  // |q_i . q_j| = cos(theta_ij / 2); theta > 90 deg means the mean is ambiguous.
  const double min_abs_dot = std::cos(std::numbers::pi / 4.0);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    for (std::size_t j = i + 1; j < keys.size(); ++j) {
      if (std::abs(dot4(keys[i].q, keys[j].q)) < min_abs_dot - 1e-12) {
        throw Error(ErrorCode::kDivergentCalibration,
                    "rotations " + std::to_string(i) + " and " + std::to_string(j) +
                        " differ by more than 90 degrees");
      }
    }
  }

  // Fixed summation order makes the result permutation invariant bit for bit.
  std::sort(keys.begin(), keys.end(), [](const RigKey& a, const RigKey& b) {
    if (a.q != b.q) return a.q < b.q;
    return std::lexicographical_compare(a.t.data(), a.t.data() + 3, b.t.data(), b.t.data() + 3);
  });

  std::array<double, 4> qsum{0.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d tsum = Eigen::Vector3d::Zero();
  const auto& ref = keys.front().q;
  for (const auto& k : keys) {
    const double sign = dot4(k.q, ref) < 0.0 ? -1.0 : 1.0;
    for (int c = 0; c < 4; ++c) qsum[c] += sign * k.q[c];
    tsum += k.t;
  }
  Eigen::Quaterniond mean(qsum[0], qsum[1], qsum[2], qsum[3]);
  mean.normalize();

  RigTransform out;
  out.R = mean.toRotationMatrix();
  out.t = tsum / static_cast<double>(keys.size());
  return out;
}

Point3 backproject(const Intrinsics& k, const Pixel& pix, double depth_mm) {
  if (!(depth_mm > 0.0) || !std::isfinite(depth_mm)) {
    throw Error(ErrorCode::kInvalidDepth, "depth must be positive, got " + std::to_string(depth_mm));
  }
  return {depth_mm * (pix.u - k.cx) / k.fx, depth_mm * (pix.v - k.cy) / k.fy, depth_mm};
}

Point3 transform_point(const RigTransform& rig, const Point3& p) {
  // Written out so the summation order is fixed: ((r0 x + r1 y) + r2 z) + t.
  const auto row = [&](int i) {
    return rig.R(i, 0) * p.x + rig.R(i, 1) * p.y + rig.R(i, 2) * p.z + rig.t(i);
  };
  return {row(0), row(1), row(2)};
}

Pixel project(const Intrinsics& k, const Point3& p) {
  if (!(p.z > 0.0)) {
    throw Error(ErrorCode::kBehindCamera, "point has z = " + std::to_string(p.z));
  }
  return {k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy};
}

Eigen::Matrix3d axis_angle(const Eigen::Vector3d& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

double rotation_angle_between(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
  return Eigen::AngleAxisd(a.transpose() * b).angle();
}

}  // namespace stereogt
