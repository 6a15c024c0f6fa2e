#include "stereogt/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "stereogt/error.hpp"

namespace stereogt {

std::string_view to_string(FieldKind k) {
  switch (k) {
    case FieldKind::kConstant: return "constant";
    case FieldKind::kRamp: return "ramp";
    case FieldKind::kTwoPlane: return "two-plane";
    case FieldKind::kBimodal: return "bimodal";
  }
  return "constant";
}

FieldKind parse_field_kind(std::string_view s) {
  if (s == "constant") return FieldKind::kConstant;
  if (s == "ramp") return FieldKind::kRamp;
  if (s == "two-plane") return FieldKind::kTwoPlane;
  if (s == "bimodal") return FieldKind::kBimodal;
  throw Error(ErrorCode::kSpec, "unknown field kind '" + std::string(s) + "'");
}

namespace {

struct Leaf {
  double cx, cy, rx, ry;
};

std::vector<Leaf> make_leaves(const SceneSpec& spec) {
  std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_real_distribution<double> ux(0.15 * spec.width, 0.85 * spec.width);
  std::uniform_real_distribution<double> uy(0.15 * spec.height, 0.85 * spec.height);
  const double base = 0.12 * std::min(spec.width, spec.height);
  std::uniform_real_distribution<double> ur(0.7 * base, 1.3 * base);
  std::vector<Leaf> leaves;
  for (int i = 0; i < spec.leaf_count; ++i) leaves.push_back({ux(rng), uy(rng), ur(rng), ur(rng)});
  return leaves;
}

double ground(const SceneSpec& spec, int x, int y) {
  return spec.disparity + spec.ramp_dx * x + spec.ramp_dy * y;
}

FieldSample sample_with(const SceneSpec& spec, const std::vector<Leaf>& leaves, int x, int y) {
  switch (spec.field) {
    case FieldKind::kConstant:
      return {spec.disparity, 0};
    case FieldKind::kRamp:
      return {ground(spec, x, y), 0};
    case FieldKind::kTwoPlane: {
      const bool inside = x >= spec.width / 4 && x < 3 * spec.width / 4 && y >= spec.height / 4 &&
                          y < 3 * spec.height / 4;
      return inside ? FieldSample{spec.near_disparity, 1} : FieldSample{spec.disparity, 0};
    }
    case FieldKind::kBimodal: {
      FieldSample best{ground(spec, x, y), 0};
      for (const auto& l : leaves) {
        const double dx = (x - l.cx) / l.rx;
        const double dy = (y - l.cy) / l.ry;
        const double r2 = dx * dx + dy * dy;
        if (r2 >= 1.0) continue;
        const double d = spec.near_disparity + 4.0 * (1.0 - r2);
        if (d > best.disparity) best = {d, 1};
      }
      return best;
    }
  }
  return {spec.disparity, 0};
}

std::uint8_t dot(std::mt19937_64& rng, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> v(0, 255);
  const bool on = u(rng) < density;
  const int value = v(rng);
  return on ? static_cast<std::uint8_t>(value) : std::uint8_t{128};
}

}  // namespace

void validate(const SceneSpec& spec) {
  if (spec.width <= 1 || spec.height <= 0) throw Error(ErrorCode::kSpec, "scene dimensions must be positive");
  if (spec.dot_density < 0.0 || spec.dot_density > 1.0) throw Error(ErrorCode::kSpec, "dot density must be in [0, 1]");
  if (spec.background_density > 1.0) throw Error(ErrorCode::kSpec, "background density must be <= 1");
  if (!(spec.baseline_mm > 0.0) || !(spec.focal_px > 0.0)) {
    throw Error(ErrorCode::kSpec, "baseline and focal length must be positive");
  }
  if (std::abs(spec.ramp_dx) >= 0.5) throw Error(ErrorCode::kSpec, "|ramp_dx| must be below 0.5 px/px");
  if (spec.leaf_count < 0) throw Error(ErrorCode::kSpec, "leaf count must be >= 0");
  const auto leaves = make_leaves(spec);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double d = sample_with(spec, leaves, x, y).disparity;
      if (!(d >= 0.0) || d >= spec.width) {
        throw Error(ErrorCode::kSpec, "disparity field leaves [0, width) at (" + std::to_string(x) + ", " +
                                          std::to_string(y) + ")");
      }
      if (d >= spec.d_max) throw Error(ErrorCode::kSpec, "disparity field reaches d_max");
    }
  }
}

FieldSample sample_field(const SceneSpec& spec, int x, int y) {
  return sample_with(spec, make_leaves(spec), x, y);
}

StereoSample synth_stereo(const SceneSpec& spec) {
  validate(spec);
  const int w = spec.width;
  const int h = spec.height;
  const double bg_density = spec.background_density < 0.0 ? spec.dot_density : spec.background_density;
  const auto leaves = make_leaves(spec);

  std::vector<double> field(static_cast<std::size_t>(w) * h);
  std::vector<int> surface(field.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const FieldSample s = sample_with(spec, leaves, x, y);
      field[static_cast<std::size_t>(y) * w + x] = s.disparity;
      surface[static_cast<std::size_t>(y) * w + x] = s.surface;
    }
  }

  GrayImage left(w, h);
  std::mt19937_64 tex(spec.seed);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int s = surface[static_cast<std::size_t>(y) * w + x];
      left.at(x, y) = dot(tex, s == 0 ? bg_density : spec.dot_density);
    }
  }

  GrayImage right(w, h);
  DisparityMap gt(w, h);
  std::mt19937_64 fresh(spec.seed * 0x2545f4914f6cdd1dull + 7);
  std::vector<double> win_d(static_cast<std::size_t>(w));
  std::vector<double> win_x(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    const double* d = field.data() + static_cast<std::size_t>(y) * w;
    const int* lab = surface.data() + static_cast<std::size_t>(y) * w;
    std::fill(win_d.begin(), win_d.end(), -std::numeric_limits<double>::infinity());
    // Each left segment [x, x+1] of one surface maps to [x - d(x), x + 1 - d(x+1)]
    // in the right view; every right pixel keeps the nearest surface covering it.
    auto cover = [&](double xl, double dl, int xr) {
      if (xr < 0 || xr >= w) return;
      if (dl > win_d[xr]) {
        win_d[xr] = dl;
        win_x[xr] = xl;
      }
    };
    for (int x = 0; x < w; ++x) {
      const double m0 = x - d[x];
      if (m0 == std::floor(m0)) cover(x, d[x], static_cast<int>(m0));
      if (x + 1 >= w || lab[x + 1] != lab[x] || std::abs(d[x + 1] - d[x]) > 0.5) continue;
      const double m1 = x + 1 - d[x + 1];
      for (int xr = static_cast<int>(std::ceil(m0)); xr <= static_cast<int>(std::floor(m1)); ++xr) {
        const double t = (xr - m0) / (m1 - m0);
        cover(x + t, d[x] + t * (d[x + 1] - d[x]), xr);
      }
    }
    for (int xr = 0; xr < w; ++xr) {
      if (win_d[xr] == -std::numeric_limits<double>::infinity()) {
        right.at(xr, y) = dot(fresh, bg_density);
        continue;
      }
      const double xl = win_x[xr];
      const int x0 = std::min(static_cast<int>(std::floor(xl)), w - 1);
      const int x1 = std::min(x0 + 1, w - 1);
      const double t = xl - x0;
      const double v = (1.0 - t) * left.at(x0, y) + t * left.at(x1, y);
      right.at(xr, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
    for (int x = 0; x < w; ++x) {
      const double xr = std::floor(x - d[x] + 0.5);
      if (xr < 0.0 || xr >= w || !(d[x] > 0.0)) continue;
      const double winner = win_d[static_cast<int>(xr)];
      if (winner > d[x] + 0.5) continue;  // hidden behind a nearer surface
      gt.at(x, y) = static_cast<float>(d[x]);
    }
  }

  StereoSample s;
  s.left = gray_to_rgb(left);
  s.right = gray_to_rgb(right);
  s.ground_truth = std::move(gt);
  s.subset = "synthetic";
  s.split = Split::kTest;
  s.index = 0;
  return s;
}

DisparityMap reference_register(const DepthMap& depth, const RigTransform& rig, const Intrinsics& k_mech,
                                const Intrinsics& k_zed, const StereoGeometry& geom, int out_width,
                                int out_height) {
  double R[3][3];
  double t[3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) R[i][j] = rig.R(i, j);
    t[i] = rig.t(i);
  }
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> zbuf(static_cast<std::size_t>(out_width) * out_height, inf);
  for (int v = 0; v < depth.height(); ++v) {
    for (int u = 0; u < depth.width(); ++u) {
      const double z = depth.at(u, v);
      if (!(z > 0.0) || !std::isfinite(z)) continue;
      const double pm[3] = {z * (u - k_mech.cx) / k_mech.fx, z * (v - k_mech.cy) / k_mech.fy, z};
      double pz[3];
      for (int i = 0; i < 3; ++i) pz[i] = R[i][0] * pm[0] + R[i][1] * pm[1] + R[i][2] * pm[2] + t[i];
      if (!(pz[2] > 0.0)) continue;
      const double uz = std::floor(k_zed.fx * pz[0] / pz[2] + k_zed.cx + 0.5);
      const double vz = std::floor(k_zed.fy * pz[1] / pz[2] + k_zed.cy + 0.5);
      if (uz < 0.0 || vz < 0.0 || uz >= out_width || vz >= out_height) continue;
      double& slot = zbuf[static_cast<std::size_t>(vz) * out_width + static_cast<std::size_t>(uz)];
      if (pz[2] < slot) slot = pz[2];
    }
  }
  DisparityMap out(out_width, out_height);
  const double bf = geom.baseline_mm * geom.focal_px;
  for (std::size_t i = 0; i < zbuf.size(); ++i) {
    if (zbuf[i] < inf) out.data()[i] = static_cast<float>(bf / zbuf[i]);
  }
  return out;
}

DepthRigScene synth_depth_rig(const SceneSpec& spec, const RigTransform& rig) {
  validate(spec);
  validate(rig);
  DepthRigScene scene;
  scene.geom = {spec.baseline_mm, spec.focal_px};
  scene.k_mech = {spec.focal_px, spec.focal_px, (spec.width - 1) / 2.0, (spec.height - 1) / 2.0};
  scene.k_zed = scene.k_mech;
  scene.rig = rig;
  scene.depth = DepthMap(spec.width, spec.height);
  const auto leaves = make_leaves(spec);
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double d = sample_with(spec, leaves, x, y).disparity;
      if (d > 0.0) scene.depth.at(x, y) = static_cast<float>(scene.geom.bf() / d);
    }
  }
  scene.expected = reference_register(scene.depth, rig, scene.k_mech, scene.k_zed, scene.geom,
                                      spec.width, spec.height);
  return scene;
}

SceneSpec parse_scene_spec(std::string_view text) {
  SceneSpec s;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) {
        throw Error(ErrorCode::kSpec, "expected key = value: '" + line + "'");
      }
      continue;
    }
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t\r");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "width") s.width = std::stoi(value);
      else if (key == "height") s.height = std::stoi(value);
      else if (key == "field") s.field = parse_field_kind(value);
      else if (key == "disparity") s.disparity = std::stod(value);
      else if (key == "near_disparity") s.near_disparity = std::stod(value);
      else if (key == "ramp_dx") s.ramp_dx = std::stod(value);
      else if (key == "ramp_dy") s.ramp_dy = std::stod(value);
      else if (key == "leaf_count") s.leaf_count = std::stoi(value);
      else if (key == "dot_density") s.dot_density = std::stod(value);
      else if (key == "background_density") s.background_density = std::stod(value);
      else if (key == "seed") s.seed = std::stoull(value);
      else if (key == "baseline_mm") s.baseline_mm = std::stod(value);
      else if (key == "focal_px") s.focal_px = std::stod(value);
      else if (key == "d_max") s.d_max = std::stod(value);
      else throw Error(ErrorCode::kSpec, "unknown scene key '" + key + "'");
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kSpec, "bad value for '" + key + "': " + value);
    }
  }
  return s;
}

SceneSpec read_scene_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene_spec(ss.str());
}

std::string format_scene_spec(const SceneSpec& s) {
  std::ostringstream out;
  out.precision(17);
  out << "width = " << s.width << "\nheight = " << s.height << "\nfield = " << to_string(s.field)
      << "\ndisparity = " << s.disparity << "\nnear_disparity = " << s.near_disparity
      << "\nramp_dx = " << s.ramp_dx << "\nramp_dy = " << s.ramp_dy << "\nleaf_count = " << s.leaf_count
      << "\ndot_density = " << s.dot_density << "\nbackground_density = " << s.background_density
      << "\nseed = " << s.seed << "\nbaseline_mm = " << s.baseline_mm << "\nfocal_px = " << s.focal_px
      << "\nd_max = " << s.d_max << "\n";
  return out.str();
}

}  // namespace stereogt
