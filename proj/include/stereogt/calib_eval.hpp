#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stereogt/geometry.hpp"

namespace stereogt {

// Chessboard inner corners seen by both cameras, in the same order.
struct CornerSet {
  int rows = 0;
  int cols = 0;
  std::vector<Pixel> mech;        // depth-camera pixel
  std::vector<double> depth_mm;   // depth-camera depth at that pixel
  std::vector<Pixel> zed;         // detected stereo-left pixel

  std::size_t size() const noexcept { return mech.size(); }
};

void validate(const CornerSet& corners);

struct RegistrationErrorStats {
  std::vector<double> errors;  // pixels, one per corner
  double mean = 0.0;
  double max = 0.0;
};

// Reprojects every depth-camera corner into the stereo-left view and
// measures the Euclidean distance to the detected corner.
RegistrationErrorStats registration_error(const CornerSet& corners, const RigTransform& rig,
                                          const Intrinsics& k_mech, const Intrinsics& k_zed);

struct TrialSummary {
  std::vector<double> trial_means;
  double mean = 0.0;  // over all corners of all trials
  double max = 0.0;
};

TrialSummary summarize_trials(std::span<const RegistrationErrorStats> trials);

// Corner file: a `grid <rows> <cols>` header, then one
// `u_mech v_mech Z_mech u_zed v_zed` record per corner. '#' comments.
CornerSet parse_corner_file(std::string_view text);
CornerSet read_corner_file(const std::filesystem::path& path);
std::string format_corner_file(const CornerSet& corners);

struct ChessboardSimulation {
  int rows = 8;
  int cols = 11;
  double square_mm = 20.0;
  double distance_mm = 600.0;
  double max_tilt_rad = 0.3;
  double detection_noise_px = 0.0;  // isotropic Gaussian sigma per axis
  std::uint64_t seed = 1;
};

// Gaussian sigma whose 2-D error magnitude has the given mean (Rayleigh).
double noise_sigma_for_mean_error(double mean_px);

// One synthetic board pose per trial, observed by both cameras through the
// true rig; detections get Gaussian noise.
std::vector<CornerSet> simulate_corner_trials(const RigTransform& true_rig, const Intrinsics& k_mech,
                                              const Intrinsics& k_zed, const ChessboardSimulation& sim,
                                              int trials);

}  // namespace stereogt
