#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stereogt/geometry.hpp"
#include "stereogt/registration.hpp"

namespace stereogt {

// Sectioned key-value text. Intrinsics in pixels, translations in millimetres.
//
//   [camera mech]          fx = ..  fy = ..  cx = ..  cy = ..
//   [stereo]               baseline_mm = ..  focal_px = ..
//   [extrinsic mech]       R = 9 values row-major   t = 3 values   (repeatable)
//   [rig]                  R = ..  t = ..                          (repeatable)
//
// Repeated extrinsic and rig sections are separate calibration runs.
struct CalibrationFile {
  std::map<std::string, Intrinsics> cameras;
  std::map<std::string, std::vector<Extrinsics>> extrinsics;  // "" for unnamed sections
  std::vector<RigTransform> rigs;
  std::optional<StereoGeometry> stereo;

  const Intrinsics& camera(const std::string& name) const;  // kNotFound
  // Named records if present, otherwise the unnamed ones.
  const std::vector<Extrinsics>& extrinsic_runs(const std::string& name) const;
};

CalibrationFile parse_calibration(std::string_view text);
CalibrationFile read_calibration(const std::filesystem::path& path);
std::string format_calibration(const CalibrationFile& calib);
void write_calibration(const std::filesystem::path& path, const CalibrationFile& calib);

}  // namespace stereogt
