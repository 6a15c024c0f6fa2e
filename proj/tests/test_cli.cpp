#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "stereogt/calibration_file.hpp"
#include "stereogt/cli.hpp"
#include "stereogt/dataset_io.hpp"
#include "stereogt/oracle.hpp"
#include "support.hpp"

namespace stereogt {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "stereogt");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json evaluate_json(const fs::path& pred, const fs::path& gt, const fs::path& json) {
  const CliRun r = run({"evaluate", "--pred", pred.string(), "--gt", gt.string(), "--json", json.string()});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  return nlohmann::json::parse(slurp(json));
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"evaluate", "--pred", "/nonexistent"}).code, kExitUsage);
  EXPECT_EQ(run({"match", "--output", "x", "--method", "sad"}).code, kExitUsage);
  const CliRun help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("synth"), std::string::npos);
}

TEST(Cli, PipelineErrorsExitOne) {
  TempDir dir("cli_err");
  DisparityMap a(4, 4), b(5, 4);
  write_disparity_subpixel(dir / "a.tiff", a);
  write_disparity_subpixel(dir / "b.tiff", b);
  const CliRun r = run({"evaluate", "--pred", (dir / "a.tiff").string(), "--gt", (dir / "b.tiff").string()});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_EQ(r.err.rfind("error: ", 0), 0u);
  fs::create_directories(dir / "d");
  EXPECT_EQ(run({"evaluate", "--pred", (dir / "d").string(), "--gt", (dir / "b.tiff").string()}).code, kExitFailure);
}

TEST(Cli, SynthRegisterEvaluateRecoversField) {
  TempDir dir("cli_reg");
  CalibrationFile rigfile;
  RigTransform rig;
  rig.R = axis_angle(Eigen::Vector3d(0.0, 1.0, 0.0), 0.01);
  rig.t = Eigen::Vector3d(-20.0, 1.0, 0.0);
  rigfile.rigs = {rig};
  write_calibration(dir / "rig.txt", rigfile);
  const CliRun s = run({"synth", "--output", (dir / "scene").string(), "--field", "bimodal", "--width", "160",
                     "--height", "90", "--disparity", "30", "--near-disparity", "70", "--depth-rig", "--rig",
                     (dir / "rig.txt").string(), "--count", "2"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  for (const char* sub : {"left", "right", "disp", "depth", "expected"}) {
    EXPECT_TRUE(fs::exists(dir / "scene" / sub / "000001.tiff") || fs::exists(dir / "scene" / sub / "000001.png"))
        << sub;
  }
  const CliRun r = run({"register", "--calib", (dir / "scene/calib.txt").string(), "--input",
                     (dir / "scene/depth").string(), "--output", (dir / "reg").string(), "--format", "both"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("000000: hit ratio"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "reg/000001.png"));
  fs::remove(dir / "reg/000000.png");
  fs::remove(dir / "reg/000001.png");
  const auto j = evaluate_json(dir / "reg", dir / "scene/expected", dir / "r.json");
  EXPECT_LE(j["aggregate"]["epe"].get<double>(), 1e-4);
  EXPECT_EQ(j["images"].size(), 2u);
}

TEST(Cli, MatchPrintsDefaults) {
  TempDir dir("cli_match");
  const CliRun s = run({"synth", "--output", dir.path().string(), "--width", "300", "--height", "24",
                     "--disparity", "12"});
  ASSERT_EQ(s.code, kExitOk) << s.err;
  const CliRun m = run({"match", "--left", (dir / "left/000000.png").string(), "--right",
                     (dir / "right/000000.png").string(), "--output", (dir / "pred.tiff").string()});
  ASSERT_EQ(m.code, kExitOk) << m.err;
  EXPECT_NE(m.out.find("# sgm: block_size=3 census=5x5 p1=216 p2=864 lr_max_diff=1 d_max=256 paths=8"),
            std::string::npos)
      << m.out;
  const CliRun b = run({"match", "--method", "bm", "--d-max", "64", "--left", (dir / "left/000000.png").string(),
                     "--right", (dir / "right/000000.png").string(), "--output", (dir / "bm.png").string()});
  ASSERT_EQ(b.code, kExitOk) << b.err;
  EXPECT_NE(b.out.find("# bm: block_size=15 d_max=64"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "bm.png"));
  const CliRun e = run({"evaluate", "--pred", (dir / "pred.tiff").string(), "--gt", (dir / "disp/000000.tiff").string(),
                     "--d-max", "256"});
  EXPECT_EQ(e.code, kExitOk) << e.err;
}

TEST(Cli, EvaluateIdenticalMapsIsZero) {
  TempDir dir("cli_eval");
  std::mt19937_64 rng(3);
  const DisparityMap gt = testing::random_disparity(rng, 40, 30, 1.0, 200.0, 0.2);
  write_disparity_subpixel(dir / "gt.tiff", gt);
  const CliRun r = run({"evaluate", "--pred", (dir / "gt.tiff").string(), "--gt", (dir / "gt.tiff").string(),
                     "--deltas", "1,3,5", "--json", (dir / "r.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("# d_max=256 invalid_cap=256"), std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
  EXPECT_EQ(j["aggregate"]["epe"].get<double>(), 0.0);
  EXPECT_EQ(j["aggregate"]["rmse"].get<double>(), 0.0);
  for (const auto& [k, v] : j["aggregate"]["bad_percent"].items()) EXPECT_EQ(v.get<double>(), 0.0) << k;
  EXPECT_EQ(run({"evaluate", "--pred", (dir / "gt.tiff").string(), "--gt", (dir / "gt.tiff").string(), "--deltas",
                 "3,1"}).code,
            kExitFailure);
}

TEST(Cli, ConvertRoundTrip) {
  TempDir dir("cli_conv");
  std::mt19937_64 rng(4);
  const DisparityMap d = testing::random_disparity(rng, 33, 17, 1.0, 250.0, 0.1);
  write_disparity_subpixel(dir / "d.tiff", d);
  ASSERT_EQ(run({"convert", "--input", (dir / "d.tiff").string(), "--output", (dir / "d.png").string()}).code,
            kExitOk);
  ASSERT_EQ(run({"convert", "--input", (dir / "d.png").string(), "--output", (dir / "e.tiff").string()}).code,
            kExitOk);
  const DisparityMap back = read_disparity(dir / "e.tiff");
  for (int y = 0; y < d.height(); ++y)
    for (int x = 0; x < d.width(); ++x) EXPECT_LE(std::abs(back.at(x, y) - d.at(x, y)), 0.5f);
}

TEST(Cli, AnalyzeReportsDensityAndHistogram) {
  TempDir dir("cli_an");
  DisparityMap d(10, 10);
  for (int x = 0; x < 10; ++x) d.at(x, 0) = 20.0f + x;
  write_disparity_subpixel(dir / "a.tiff", d);
  const CliRun r = run({"analyze", "--gt", dir.path().string(), "--bin-width", "5", "--csv", (dir / "h.csv").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("0.1000"), std::string::npos);
  EXPECT_NE(r.out.find("range 20.000 .. 29.000 px over 10 valid pixels, 2 bins"), std::string::npos) << r.out;
  EXPECT_EQ(slurp(dir / "h.csv"), "bin_low,bin_high,frequency\n20,25,0.5\n25,30,0.5\n");
}

TEST(Cli, CalibChainAveragesRuns) {
  TempDir dir("cli_chain");
  std::mt19937_64 rng(8);
  CalibrationFile in;
  in.cameras["mech"] = {900.0, 900.0, 320.0, 240.0};
  in.cameras["zed"] = {1050.0, 1050.0, 640.0, 360.0};
  in.stereo = StereoGeometry{120.0, 1050.0};
  const RigTransform truth = testing::random_rig(rng, 0.2, 80.0);
  for (int i = 0; i < 3; ++i) {
    const RigTransform world = testing::random_rig(rng, 1.0, 900.0);
    const Extrinsics m{world.R, world.t};
    const Extrinsics z{truth.R * world.R, truth.R * world.t + truth.t};
    in.extrinsics["mech"].push_back(m);
    in.extrinsics["zed"].push_back(z);
  }
  write_calibration(dir / "in.txt", in);
  const CliRun r = run({"calib-chain", "--mech", (dir / "in.txt").string(), "-o", (dir / "out.txt").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("# chained 3 calibration run(s)"), std::string::npos);
  const CalibrationFile out = read_calibration(dir / "out.txt");
  ASSERT_EQ(out.rigs.size(), 1u);
  EXPECT_LT((out.rigs[0].R - truth.R).norm(), 1e-9);
  EXPECT_LT((out.rigs[0].t - truth.t).norm(), 1e-6);
  EXPECT_EQ(out.camera("zed").fx, 1050.0);
  ASSERT_TRUE(out.stereo);

  in.extrinsics["zed"].pop_back();
  write_calibration(dir / "bad.txt", in);
  EXPECT_EQ(run({"calib-chain", "--mech", (dir / "bad.txt").string(), "-o", (dir / "o.txt").string()}).code,
            kExitFailure);
}

TEST(Cli, CalibErrorSimulation) {
  TempDir dir("cli_cerr");
  CalibrationFile c;
  c.cameras["mech"] = {920.0, 920.0, 640.0, 360.0};
  c.cameras["zed"] = {1050.0, 1050.0, 640.0, 360.0};
  RigTransform rig;
  rig.t = Eigen::Vector3d(-60.0, 0.0, 0.0);
  c.rigs = {rig};
  write_calibration(dir / "c.txt", c);
  auto mean_of = [](const std::string& out) {
    const auto pos = out.find("\nall");
    EXPECT_NE(pos, std::string::npos);
    std::istringstream in(out.substr(pos + 4));
    double mean = -1.0;
    in >> mean;
    return mean;
  };
  const CliRun exact = run({"calib-error", "--calib", (dir / "c.txt").string(), "--simulate", "6", "--noise-mean", "0"});
  ASSERT_EQ(exact.code, kExitOk) << exact.err;
  EXPECT_EQ(mean_of(exact.out), 0.0);
  const CliRun noisy = run({"calib-error", "--calib", (dir / "c.txt").string(), "--simulate", "6", "--noise-mean", "2.5", "--csv",
                         (dir / "e.csv").string()});
  ASSERT_EQ(noisy.code, kExitOk) << noisy.err;
  EXPECT_NEAR(mean_of(noisy.out), 2.5, 0.3);
  const std::string csv = slurp(dir / "e.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 6 * 88);
  EXPECT_EQ(run({"calib-error", "--calib", (dir / "c.txt").string()}).code, kExitUsage);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  TempDir dir("cli_idem");
  const std::vector<std::string> synth = {"--width", "120", "--height", "40", "--field", "ramp", "--ramp-dx",
                                          "0.05", "--disparity", "20", "--seed", "77", "--depth-rig"};
  for (const char* out : {"a", "b"}) {
    auto args = synth;
    args.insert(args.begin(), {"synth", "--output", (dir / out).string()});
    ASSERT_EQ(run(args).code, kExitOk);
    ASSERT_EQ(run({"register", "--calib", (dir / out / "calib.txt").string(), "--input",
                   (dir / out / "depth").string(), "--output", (dir / out / "reg").string()})
                  .code,
              kExitOk);
    ASSERT_EQ(run({"match", "--d-max", "48", "--left", (dir / out / "left/000000.png").string(), "--right",
                   (dir / out / "right/000000.png").string(), "--output", (dir / out / "pred.tiff").string()})
                  .code,
              kExitOk);
  }
  for (const char* f : {"left/000000.png", "right/000000.png", "disp/000000.tiff", "depth/000000.tiff",
                        "calib.txt", "scene.txt", "reg/000000.tiff", "pred.tiff"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  auto args = synth;
  args.insert(args.begin(), {"synth", "--output", (dir / "c").string()});
  args[args.size() - 2] = "78";
  args.erase(std::find(args.begin(), args.end(), "--depth-rig"));
  args.back() = "78";
  ASSERT_EQ(run(args).code, kExitOk);
  EXPECT_NE(slurp(dir / "a/left/000000.png"), slurp(dir / "c/left/000000.png"));
}

TEST(Cli, SynthSpecFileWithOverride) {
  TempDir dir("cli_spec");
  SceneSpec s;
  s.width = 80;
  s.height = 20;
  s.field = FieldKind::kTwoPlane;
  s.disparity = 10.0;
  s.near_disparity = 20.0;
  {
    std::ofstream f(dir / "spec.txt");
    f << format_scene_spec(s);
  }
  ASSERT_EQ(run({"synth", "--spec", (dir / "spec.txt").string(), "--output", (dir / "o").string(), "--height", "24"})
                .code,
            kExitOk);
  const SceneSpec written = read_scene_spec(dir / "o/scene.txt");
  EXPECT_EQ(written.width, 80);
  EXPECT_EQ(written.height, 24);
  EXPECT_EQ(written.field, FieldKind::kTwoPlane);
  EXPECT_EQ(read_disparity(dir / "o/disp/000000.tiff").height(), 24);
}

TEST(Cli, MatchDatasetFromEnvironmentRoot) {
  TempDir dir("cli_root");
  SceneSpec spec;
  spec.width = 96;
  spec.height = 32;
  spec.disparity = 8.0;
  StereoSample s = synth_stereo(spec);
  s.subset = "leaf";
  s.split = Split::kTest;
  for (int i = 0; i < 2; ++i) {
    s.index = i;
    save_sample(dir.path(), s);
  }
  {
    std::ofstream f(dir / "manifest.txt");
    f << "leaf 0 0 2 96x32\n";
  }
  ::setenv("STEREO_GT_ROOT", dir.path().c_str(), 1);
  const CliRun r = run({"match", "--subset", "leaf", "--split", "test", "--d-max", "32", "--crop", "24x64", "--output",
                     (dir / "pred").string()});
  ::unsetenv("STEREO_GT_ROOT");
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(fs::exists(dir / "pred/000000.tiff"));
  EXPECT_TRUE(fs::exists(dir / "pred/000001.tiff"));
  EXPECT_TRUE(fs::exists(dir / "pred/gt/000001.tiff"));
  EXPECT_EQ(read_disparity(dir / "pred/000001.tiff").width(), 64);
  EXPECT_EQ(run({"match", "--subset", "leaf", "--output", (dir / "p2").string()}).code, kExitUsage);
}

}  // namespace
}  // namespace stereogt
