#include "stereogt/calibration_file.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "stereogt/error.hpp"

namespace stereogt {

const Intrinsics& CalibrationFile::camera(const std::string& name) const {
  auto it = cameras.find(name);
  if (it == cameras.end()) throw Error(ErrorCode::kNotFound, "no [camera " + name + "] section");
  return it->second;
}

const std::vector<Extrinsics>& CalibrationFile::extrinsic_runs(const std::string& name) const {
  if (auto it = extrinsics.find(name); it != extrinsics.end() && !it->second.empty()) return it->second;
  if (auto it = extrinsics.find(""); it != extrinsics.end() && !it->second.empty()) return it->second;
  throw Error(ErrorCode::kNotFound, "no extrinsic records for '" + name + "'");
}

namespace {

std::string trim(const std::string& v) {
  const auto b = v.find_first_not_of(" \t\r");
  const auto e = v.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string{} : v.substr(b, e - b + 1);
}

std::vector<double> numbers(const std::string& value, std::size_t expected, const std::string& key) {
  std::istringstream in(value);
  std::vector<double> out;
  double v = 0.0;
  while (in >> v) out.push_back(v);
  if (!in.eof() || out.size() != expected) {
    throw Error(ErrorCode::kFormat, "'" + key + "' needs " + std::to_string(expected) + " numbers");
  }
  return out;
}

enum class Section { kNone, kCamera, kStereo, kExtrinsic, kRig };

}  // namespace

CalibrationFile parse_calibration(std::string_view text) {
  CalibrationFile c;
  std::istringstream in{std::string(text)};
  std::string line;
  Section section = Section::kNone;
  std::string name;
  Intrinsics* cam = nullptr;
  Extrinsics* ext = nullptr;
  RigTransform* rig = nullptr;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::kFormat, "bad section header on line " + std::to_string(lineno));
      std::istringstream hs(line.substr(1, line.size() - 2));
      std::string kind;
      hs >> kind;
      name.clear();
      hs >> name;
      if (kind == "camera") {
        if (name.empty()) throw Error(ErrorCode::kFormat, "camera section needs a name");
        section = Section::kCamera;
        cam = &c.cameras[name];
        *cam = Intrinsics{0.0, 0.0, 0.0, 0.0};
      } else if (kind == "stereo") {
        section = Section::kStereo;
        c.stereo = StereoGeometry{};
      } else if (kind == "extrinsic") {
        section = Section::kExtrinsic;
        ext = &c.extrinsics[name].emplace_back();
      } else if (kind == "rig") {
        section = Section::kRig;
        rig = &c.rigs.emplace_back();
      } else {
        throw Error(ErrorCode::kFormat, "unknown section '" + kind + "'");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kFormat, "expected key = value on line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto set_rt = [&](Eigen::Matrix3d& R, Eigen::Vector3d& t) {
      if (key == "R") {
        const auto v = numbers(value, 9, key);
        for (int i = 0; i < 9; ++i) R(i / 3, i % 3) = v[i];
      } else if (key == "t") {
        const auto v = numbers(value, 3, key);
        t = Eigen::Vector3d(v[0], v[1], v[2]);
      } else {
        throw Error(ErrorCode::kFormat, "unknown key '" + key + "'");
      }
    };
    switch (section) {
      case Section::kCamera: {
        const double v = numbers(value, 1, key)[0];
        if (key == "fx") cam->fx = v;
        else if (key == "fy") cam->fy = v;
        else if (key == "cx") cam->cx = v;
        else if (key == "cy") cam->cy = v;
        else throw Error(ErrorCode::kFormat, "unknown camera key '" + key + "'");
        break;
      }
      case Section::kStereo: {
        const double v = numbers(value, 1, key)[0];
        if (key == "baseline_mm") c.stereo->baseline_mm = v;
        else if (key == "focal_px") c.stereo->focal_px = v;
        else throw Error(ErrorCode::kFormat, "unknown stereo key '" + key + "'");
        break;
      }
      case Section::kExtrinsic:
        set_rt(ext->R, ext->t);
        break;
      case Section::kRig:
        set_rt(rig->R, rig->t);
        break;
      case Section::kNone:
        throw Error(ErrorCode::kFormat, "key outside a section on line " + std::to_string(lineno));
    }
  }
  for (const auto& [n, k] : c.cameras) validate(k);
  for (const auto& [n, runs] : c.extrinsics) {
    for (const auto& e : runs) validate(e);
  }
  for (const auto& r : c.rigs) validate(r);
  if (c.stereo) validate(*c.stereo);
  return c;
}

CalibrationFile read_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kNotFound, path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_calibration(ss.str());
}

std::string format_calibration(const CalibrationFile& c) {
  std::ostringstream out;
  char buf[512];
  auto rt = [&](const Eigen::Matrix3d& R, const Eigen::Vector3d& t) {
    std::snprintf(buf, sizeof(buf), "R = %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", R(0, 0),
                  R(0, 1), R(0, 2), R(1, 0), R(1, 1), R(1, 2), R(2, 0), R(2, 1), R(2, 2));
    out << buf;
    std::snprintf(buf, sizeof(buf), "t = %.17g %.17g %.17g\n", t(0), t(1), t(2));
    out << buf;
  };
  out << "# intrinsics in pixels, translations in millimetres\n";
  for (const auto& [name, k] : c.cameras) {
    std::snprintf(buf, sizeof(buf), "[camera %s]\nfx = %.17g\nfy = %.17g\ncx = %.17g\ncy = %.17g\n\n",
                  name.c_str(), k.fx, k.fy, k.cx, k.cy);
    out << buf;
  }
  if (c.stereo) {
    std::snprintf(buf, sizeof(buf), "[stereo]\nbaseline_mm = %.17g\nfocal_px = %.17g\n\n", c.stereo->baseline_mm,
                  c.stereo->focal_px);
    out << buf;
  }
  for (const auto& [name, runs] : c.extrinsics) {
    for (const auto& e : runs) {
      out << (name.empty() ? "[extrinsic]\n" : "[extrinsic " + name + "]\n");
      rt(e.R, e.t);
      out << '\n';
    }
  }
  for (const auto& r : c.rigs) {
    out << "[rig]\n";
    rt(r.R, r.t);
    out << '\n';
  }
  return out.str();
}

void write_calibration(const std::filesystem::path& path, const CalibrationFile& c) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << format_calibration(c);
}

}  // namespace stereogt
