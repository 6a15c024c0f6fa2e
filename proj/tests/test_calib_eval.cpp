#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "stereogt/calib_eval.hpp"
#include "stereogt/error.hpp"
#include "support.hpp"

namespace stereogt {
namespace {

using testing::random_rig;

const Intrinsics kZed{1050.0, 1050.0, 640.0, 360.0};
const Intrinsics kMech{920.0, 925.0, 630.0, 355.0};

CornerSet flat_board(double z) {
  CornerSet c;
  c.rows = 8;
  c.cols = 11;
  for (int i = 0; i < 88; ++i) {
    const Pixel p{450.0 + 25.0 * (i % 11), 250.0 + 25.0 * (i / 11)};
    c.mech.push_back(p);
    c.depth_mm.push_back(z);
    c.zed.push_back(p);
  }
  return c;
}

TEST(RegistrationError, ExactCalibrationIsZero) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const RigTransform rig = random_rig(rng, 0.1, 80.0);
    ChessboardSimulation sim;
    sim.seed = 100 + i;
    for (const CornerSet& c : simulate_corner_trials(rig, kMech, kZed, sim, 3)) {
      const RegistrationErrorStats st = registration_error(c, rig, kMech, kZed);
      EXPECT_LE(st.mean, 1e-9);
      EXPECT_LE(st.max, 1e-9);
      EXPECT_EQ(st.errors.size(), 88u);
    }
  }
}

TEST(RegistrationError, TranslationOffsetGivesFocalTimesShiftOverDepth) {
  for (double z : {400.0, 600.0, 1200.0}) {
    for (double dt : {0.5, 2.0, 7.5}) {
      RigTransform shifted;
      shifted.t = Eigen::Vector3d(dt, 0.0, 0.0);
      const RegistrationErrorStats st = registration_error(flat_board(z), shifted, kZed, kZed);
      const double expected = kZed.fx * dt / z;
      EXPECT_NEAR(st.mean, expected, 1e-6 * expected);
      for (double e : st.errors) EXPECT_NEAR(e, expected, 1e-9);
    }
  }
}

TEST(RegistrationError, PerturbedRigOnTiltedBoards) {
  RigTransform rig;
  rig.R = axis_angle(Eigen::Vector3d(0.1, 1.0, 0.0), 0.04);
  rig.t = Eigen::Vector3d(-60.0, 3.0, 1.0);
  ChessboardSimulation sim;
  sim.seed = 9;
  const auto trials = simulate_corner_trials(rig, kMech, kZed, sim, 6);
  RigTransform wrong = rig;
  wrong.t.x() += 2.0;
  for (const CornerSet& c : trials) {
    const RegistrationErrorStats st = registration_error(c, wrong, kMech, kZed);
    double expected = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const Point3 p = transform_point(rig, backproject(kMech, c.mech[i], c.depth_mm[i]));
      expected += kZed.fx * 2.0 / p.z;
    }
    expected /= static_cast<double>(c.size());
    EXPECT_NEAR(st.mean, expected, 0.01 * expected);
  }
}

TEST(RegistrationError, InvariantToSharedWorldFrame) {
  std::mt19937_64 rng(2);
  const Extrinsics mech{axis_angle(Eigen::Vector3d(1, 2, 3), 0.3), Eigen::Vector3d(10, 20, 700)};
  const Extrinsics zed{axis_angle(Eigen::Vector3d(1, 2, 3.1), 0.31), Eigen::Vector3d(-50, 22, 705)};
  const RigTransform rig = chain_extrinsics(mech, zed);
  ChessboardSimulation sim;
  sim.detection_noise_px = 1.5;
  sim.seed = 3;
  const CornerSet c = simulate_corner_trials(rig, kMech, kZed, sim, 1).front();
  const double base = registration_error(c, rig, kMech, kZed).mean;
  for (int i = 0; i < 10; ++i) {
    // world' = W world + s, so each world->camera transform becomes E W^-1
    const RigTransform w = random_rig(rng, 3.0, 1000.0);
    const RigTransform wi = w.inverse();
    const Extrinsics m2{mech.R * wi.R, mech.R * wi.t + mech.t};
    const Extrinsics z2{zed.R * wi.R, zed.R * wi.t + zed.t};
    EXPECT_NEAR(registration_error(c, chain_extrinsics(m2, z2), kMech, kZed).mean, base, 1e-9);
  }
}

TEST(RegistrationError, NoisyTrialsReproduceExperimentShape) {
  RigTransform rig;
  rig.t = Eigen::Vector3d(-63.0, 0.0, 0.0);
  ChessboardSimulation sim;
  sim.detection_noise_px = noise_sigma_for_mean_error(2.5);
  sim.seed = 4;
  const auto trials = simulate_corner_trials(rig, kMech, kZed, sim, 6);
  ASSERT_EQ(trials.size(), 6u);
  std::vector<RegistrationErrorStats> stats;
  for (const auto& c : trials) {
    EXPECT_EQ(c.rows, 8);
    EXPECT_EQ(c.cols, 11);
    EXPECT_EQ(c.size(), 88u);
    stats.push_back(registration_error(c, rig, kMech, kZed));
  }
  const TrialSummary s = summarize_trials(stats);
  EXPECT_EQ(s.trial_means.size(), 6u);
  EXPECT_NEAR(s.mean, 2.5, 0.3);  // 528 Rayleigh samples
  EXPECT_GE(s.max, s.mean);
}

TEST(RegistrationError, NoiseSigmaForMean) {
  EXPECT_NEAR(noise_sigma_for_mean_error(2.5), 2.5 / std::sqrt(M_PI / 2.0), 1e-15);
  EXPECT_EQ(noise_sigma_for_mean_error(0.0), 0.0);
}

TEST(RegistrationError, BehindCameraNamesCorner) {
  CornerSet c = flat_board(500.0);
  RigTransform rig;
  rig.t = Eigen::Vector3d(0.0, 0.0, -550.0);
  for (std::size_t i = 0; i < c.size(); ++i) c.depth_mm[i] = i == 17 ? 100.0 : 600.0;
  try {
    registration_error(c, rig, kZed, kZed);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBehindCamera);
    EXPECT_NE(std::string(e.what()).find("corner 17"), std::string::npos);
  }
}

TEST(CornerSet, Validation) {
  CornerSet c = flat_board(500.0);
  c.depth_mm[5] = 0.0;
  EXPECT_THROW(validate(c), Error);
  c = flat_board(500.0);
  c.zed.pop_back();
  EXPECT_THROW(validate(c), Error);
  c = flat_board(500.0);
  c.rows = 7;
  EXPECT_THROW(validate(c), Error);
  EXPECT_THROW(summarize_trials(std::vector<RegistrationErrorStats>{}), Error);
}

TEST(CornerFile, RoundTrip) {
  RigTransform rig;
  rig.t = Eigen::Vector3d(-63.0, 1.0, 0.5);
  ChessboardSimulation sim;
  sim.detection_noise_px = 1.0;
  const CornerSet c = simulate_corner_trials(rig, kMech, kZed, sim, 1).front();
  const CornerSet back = parse_corner_file(format_corner_file(c));
  EXPECT_EQ(back.rows, 8);
  EXPECT_EQ(back.cols, 11);
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.mech[i].u, c.mech[i].u);
    EXPECT_EQ(back.zed[i].v, c.zed[i].v);
    EXPECT_EQ(back.depth_mm[i], c.depth_mm[i]);
  }
}

TEST(CornerFile, Malformed) {
  EXPECT_THROW(parse_corner_file("1 2 3 4 5\n"), Error);
  EXPECT_THROW(parse_corner_file("grid 1 2\n1 2 3 4 5\n"), Error);  // too few records
  EXPECT_THROW(parse_corner_file("grid 1 1\n1 2 x 4 5\n"), Error);
  EXPECT_NO_THROW(parse_corner_file("# header\ngrid 1 1\n1 2 3 4 5 # trailing\n"));
  EXPECT_THROW(read_corner_file("/nonexistent/corners.txt"), Error);
}

}  // namespace
}  // namespace stereogt
