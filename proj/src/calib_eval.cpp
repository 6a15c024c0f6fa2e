#include "stereogt/calib_eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "stereogt/error.hpp"

namespace stereogt {

void validate(const CornerSet& c) {
  if (c.rows <= 0 || c.cols <= 0) throw Error(ErrorCode::kInput, "corner grid shape must be positive");
  const auto n = static_cast<std::size_t>(c.rows) * c.cols;
  if (c.mech.size() != n || c.depth_mm.size() != n || c.zed.size() != n) {
    throw Error(ErrorCode::kInput, "corner lists must hold rows*cols = " + std::to_string(n) + " entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(c.depth_mm[i] > 0.0)) {
      throw Error(ErrorCode::kInvalidDepth, "corner " + std::to_string(i) + " has non-positive depth");
    }
  }
}

RegistrationErrorStats registration_error(const CornerSet& corners, const RigTransform& rig,
                                          const Intrinsics& k_mech, const Intrinsics& k_zed) {
  validate(corners);
  validate(rig);
  validate(k_mech);
  validate(k_zed);
  RegistrationErrorStats st;
  st.errors.reserve(corners.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    const Point3 p = transform_point(rig, backproject(k_mech, corners.mech[i], corners.depth_mm[i]));
    if (!(p.z > 0.0)) {
      throw Error(ErrorCode::kBehindCamera, "corner " + std::to_string(i) + " lands behind the stereo camera");
    }
    const Pixel q = project(k_zed, p);
    const double e = std::hypot(q.u - corners.zed[i].u, q.v - corners.zed[i].v);
    st.errors.push_back(e);
    sum += e;
    st.max = std::max(st.max, e);
  }
  st.mean = sum / static_cast<double>(corners.size());
  return st;
}

TrialSummary summarize_trials(std::span<const RegistrationErrorStats> trials) {
  if (trials.empty()) throw Error(ErrorCode::kEmptyInput, "no trials");
  TrialSummary s;
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : trials) {
    s.trial_means.push_back(t.mean);
    for (double e : t.errors) sum += e;
    n += t.errors.size();
    s.max = std::max(s.max, t.max);
  }
  s.mean = n == 0 ? 0.0 : sum / static_cast<double>(n);
  return s;
}

CornerSet parse_corner_file(std::string_view text) {
  CornerSet c;
  std::istringstream in{std::string(text)};
  std::string line;
  bool have_grid = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "grid") {
      if (!(ls >> c.rows >> c.cols)) throw Error(ErrorCode::kFormat, "malformed grid header");
      have_grid = true;
      continue;
    }
    if (!have_grid) throw Error(ErrorCode::kFormat, "corner file must start with a grid header");
    std::istringstream rs(line);
    double um, vm, z, uz, vz;
    if (!(rs >> um >> vm >> z >> uz >> vz)) {
      throw Error(ErrorCode::kFormat, "corner record on line " + std::to_string(lineno) + " is malformed");
    }
    c.mech.push_back({um, vm});
    c.depth_mm.push_back(z);
    c.zed.push_back({uz, vz});
  }
  if (!have_grid) throw Error(ErrorCode::kFormat, "missing grid header");
  validate(c);
  return c;
}

CornerSet read_corner_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corner_file(ss.str());
}

std::string format_corner_file(const CornerSet& c) {
  std::ostringstream out;
  out << "# u_mech v_mech Z_mech u_zed v_zed\n";
  out << "grid " << c.rows << ' ' << c.cols << '\n';
  char buf[160];
  for (std::size_t i = 0; i < c.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %.17g %.17g\n", c.mech[i].u, c.mech[i].v,
                  c.depth_mm[i], c.zed[i].u, c.zed[i].v);
    out << buf;
  }
  return out.str();
}

double noise_sigma_for_mean_error(double mean_px) {
  return mean_px / std::sqrt(std::numbers::pi / 2.0);
}

std::vector<CornerSet> simulate_corner_trials(const RigTransform& true_rig, const Intrinsics& k_mech,
                                              const Intrinsics& k_zed, const ChessboardSimulation& sim,
                                              int trials) {
  validate(true_rig);
  std::mt19937_64 rng(sim.seed);
  std::uniform_real_distribution<double> tilt(-sim.max_tilt_rad, sim.max_tilt_rad);
  std::normal_distribution<double> noise(0.0, sim.detection_noise_px > 0.0 ? sim.detection_noise_px : 1.0);
  std::vector<CornerSet> out;
  for (int t = 0; t < trials; ++t) {
    const Eigen::Matrix3d pose = axis_angle(Eigen::Vector3d::UnitX(), tilt(rng)) *
                                 axis_angle(Eigen::Vector3d::UnitY(), tilt(rng));
    CornerSet c;
    c.rows = sim.rows;
    c.cols = sim.cols;
    for (int r = 0; r < sim.rows; ++r) {
      for (int k = 0; k < sim.cols; ++k) {
        const Eigen::Vector3d local((k - (sim.cols - 1) / 2.0) * sim.square_mm,
                                    (r - (sim.rows - 1) / 2.0) * sim.square_mm, 0.0);
        const Eigen::Vector3d pm = pose * local + Eigen::Vector3d(0.0, 0.0, sim.distance_mm);
        const Point3 p_mech{pm.x(), pm.y(), pm.z()};
        Pixel zed = project(k_zed, transform_point(true_rig, p_mech));
        if (sim.detection_noise_px > 0.0) {
          zed.u += noise(rng);
          zed.v += noise(rng);
        }
        c.mech.push_back(project(k_mech, p_mech));
        c.depth_mm.push_back(p_mech.z);
        c.zed.push_back(zed);
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace stereogt
