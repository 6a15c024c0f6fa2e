#include "stereogt/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>

#include "stereogt/calib_eval.hpp"
#include "stereogt/calibration_file.hpp"
#include "stereogt/dataset_io.hpp"
#include "stereogt/error.hpp"
#include "stereogt/geometry.hpp"
#include "stereogt/matchers.hpp"
#include "stereogt/metrics.hpp"
#include "stereogt/oracle.hpp"
#include "stereogt/registration.hpp"

namespace stereogt {

namespace {

struct Size2 {
  int height = 0;
  int width = 0;
};

// "HxW", e.g. 256x512.
Size2 parse_size(const std::string& s) {
  Size2 out;
  char x = 0;
  std::istringstream in(s);
  if (!(in >> out.height >> x >> out.width) || x != 'x' || out.height <= 0 || out.width <= 0 ||
      !(in >> std::ws).eof()) {
    throw CLI::ValidationError("size", "expected HxW, got '" + s + "'");
  }
  return out;
}

std::vector<double> parse_deltas(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--deltas", "bad value '" + item + "'");
    }
  }
  return out;
}

bool is_tiff(const fs::path& p) {
  const auto e = p.extension().string();
  return e == ".tiff" || e == ".tif";
}

void write_disparity(const fs::path& path, const DisparityMap& d, std::ostream& out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (is_tiff(path)) {
    write_disparity_subpixel(path, d);
    return;
  }
  const QuantizationReport rep = write_disparity_pixel(path, d);
  if (rep.lost_to_zero > 0) {
    out << "# " << path.string() << ": " << rep.lost_to_zero
        << " disparities below 0.5 px became invalid in 8-bit form\n";
  }
}

std::vector<fs::path> list_files(const fs::path& p, std::initializer_list<const char*> exts) {
  std::vector<fs::path> files;
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p)) {
      if (!e.is_regular_file()) continue;
      const auto ext = e.path().extension().string();
      if (std::any_of(exts.begin(), exts.end(), [&](const char* x) { return ext == x; })) {
        files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(p);
  }
  if (files.empty()) throw Error(ErrorCode::kNotFound, "no input files in " + p.string());
  return files;
}

void print_rig(std::ostream& out, const char* label, const RigTransform& r) {
  char buf[256];
  out << label << "\n";
  for (int i = 0; i < 3; ++i) {
    std::snprintf(buf, sizeof(buf), "  [% .9f % .9f % .9f]   t %.6f mm\n", r.R(i, 0), r.R(i, 1), r.R(i, 2),
                  r.t(i));
    out << buf;
  }
}

RigTransform rig_from(const CalibrationFile& calib) {
  if (calib.rigs.empty()) throw Error(ErrorCode::kNotFound, "calibration has no [rig] section");
  return average_rig(calib.rigs);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Disparity ground truth from depth registration, classical stereo baselines and metrics",
               "stereogt"};
  app.require_subcommand(1);
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker threads for parallel kernels (0 = all cores)")
      ->check(CLI::NonNegativeNumber);

  // calib-chain
  auto* chain = app.add_subcommand("calib-chain", "chain per-camera extrinsics into an averaged rig");
  std::string chain_mech, chain_zed, chain_out;
  chain->add_option("--mech", chain_mech, "calibration file with the depth camera's extrinsic runs")
      ->required()->check(CLI::ExistingFile);
  chain->add_option("--zed", chain_zed, "calibration file with the stereo-left extrinsic runs (default: --mech)")
      ->check(CLI::ExistingFile);
  chain->add_option("-o,--output", chain_out, "output calibration file")->required();

  // calib-error
  auto* cerr_cmd = app.add_subcommand("calib-error", "reprojection error of chessboard corners through the rig");
  std::vector<std::string> corner_files;
  std::string cerr_calib, cerr_csv;
  int sim_trials = 0;
  double sim_mean = 0.0;
  std::uint64_t seed = 1;
  cerr_cmd->add_option("--corners", corner_files, "corner files, one per trial")->check(CLI::ExistingFile);
  cerr_cmd->add_option("--calib", cerr_calib, "calibration with [camera mech], [camera zed] and [rig]")
      ->required()->check(CLI::ExistingFile);
  cerr_cmd->add_option("--simulate", sim_trials, "run N synthetic 8x11 trials instead of reading corners")
      ->check(CLI::NonNegativeNumber);
  cerr_cmd->add_option("--noise-mean", sim_mean, "target mean detection error of the simulation (px, default 0)");
  cerr_cmd->add_option("--csv", cerr_csv, "write per-corner errors");
  cerr_cmd->add_option("--seed", seed, "random seed");

  // register
  auto* reg = app.add_subcommand("register", "convert depth maps into stereo-left disparity ground truth");
  std::string reg_calib, reg_in, reg_out, reg_format = "tiff";
  int reg_w = 0, reg_h = 0;
  reg->add_option("--calib", reg_calib, "calibration with cameras mech/zed, [stereo] and [rig]")
      ->required()->check(CLI::ExistingFile);
  reg->add_option("--input", reg_in, "depth file or directory (16-bit PNG in mm or float TIFF)")
      ->required()->check(CLI::ExistingPath);
  reg->add_option("--output", reg_out, "output directory")->required();
  reg->add_option("--width", reg_w, "output width (default: depth width)");
  reg->add_option("--height", reg_h, "output height (default: depth height)");
  reg->add_option("--format", reg_format, "tiff, png or both")->check(CLI::IsMember({"tiff", "png", "both"}));

  // convert
  auto* conv = app.add_subcommand("convert", "transcode disparity between float TIFF and 8-bit PNG");
  std::string conv_in, conv_out;
  conv->add_option("--input", conv_in, "input disparity")->required()->check(CLI::ExistingFile);
  conv->add_option("--output", conv_out, "output path; the extension selects the format")->required();

  // match
  auto* match = app.add_subcommand("match", "run BM or SGM");
  std::string method = "sgm", left_path, right_path, match_out, root, subset, split = "test";
  int index = -1;
  int d_max = 256, block_size = 0, p1 = 216, p2 = 864, paths = 8;
  double lr_max_diff = 1.0;
  std::string crop_arg, pad_arg;
  match->add_option("--method", method, "bm or sgm")->check(CLI::IsMember({"bm", "sgm"}));
  match->add_option("--left", left_path, "left view PNG");
  match->add_option("--right", right_path, "right view PNG");
  match->add_option("--output", match_out, "output file (file mode) or directory (dataset mode)")->required();
  match->add_option("--root", root, "dataset root (default: $STEREO_GT_ROOT)");
  match->add_option("--subset", subset, "dataset subset");
  match->add_option("--split", split, "train, validation or test");
  match->add_option("--index", index, "single sample index (default: whole split)");
  match->add_option("--d-max", d_max, "maximum disparity")->check(CLI::Range(1, 1024));
  match->add_option("--block-size", block_size, "block size (BM default 15, SGM default 3)");
  match->add_option("--p1", p1, "SGM small-jump penalty");
  match->add_option("--p2", p2, "SGM large-jump penalty");
  match->add_option("--lr-max-diff", lr_max_diff, "SGM left-right check tolerance (inf disables)");
  match->add_option("--paths", paths, "SGM aggregation paths")->check(CLI::IsMember({4, 8}));
  match->add_option("--crop", crop_arg, "random crop HxW before matching, e.g. 256x512");
  match->add_option("--pad", pad_arg, "zero-pad top/right to HxW before matching, e.g. 608x1056");
  match->add_option("--seed", seed, "crop seed");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "bad-delta, EPE and RMSE against ground truth");
  std::string pred_path, gt_path, json_out, deltas_arg = "1,3,5";
  double eval_dmax = 256.0, cap = -1.0;
  eval->add_option("--pred", pred_path, "prediction file or directory")->required()->check(CLI::ExistingPath);
  eval->add_option("--gt", gt_path, "ground-truth file or directory")->required()->check(CLI::ExistingPath);
  eval->add_option("--d-max", eval_dmax, "valid ground truth is 0 < d < d-max");
  eval->add_option("--deltas", deltas_arg, "comma separated bad-delta thresholds");
  eval->add_option("--invalid-cap", cap, "error charged to missing predictions (default: d-max)");
  eval->add_option("--json", json_out, "also write a JSON report");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "density and disparity histogram");
  std::string an_in, an_csv;
  double bin_width = 1.0;
  analyze->add_option("--gt", an_in, "disparity file or directory")->required()->check(CLI::ExistingPath);
  analyze->add_option("--bin-width", bin_width, "histogram bin width (px)")->check(CLI::PositiveNumber);
  analyze->add_option("--csv", an_csv, "write the pooled histogram as CSV");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic scenes with exact ground truth");
  SceneSpec spec;
  std::string spec_file, synth_out, field = "constant", rig_file;
  int count = 1;
  bool depth_rig = false;
  synth->add_option("--spec", spec_file, "scene spec file (flags below override it)")->check(CLI::ExistingFile);
  synth->add_option("--output", synth_out, "output directory")->required();
  synth->add_option("--field", field, "constant, ramp, two-plane or bimodal")
      ->check(CLI::IsMember({"constant", "ramp", "two-plane", "bimodal"}));
  synth->add_option("--width", spec.width);
  synth->add_option("--height", spec.height);
  synth->add_option("--disparity", spec.disparity, "base / far disparity");
  synth->add_option("--near-disparity", spec.near_disparity, "near plane / leaf disparity");
  synth->add_option("--ramp-dx", spec.ramp_dx);
  synth->add_option("--ramp-dy", spec.ramp_dy);
  synth->add_option("--density", spec.dot_density, "random-dot density");
  synth->add_option("--background-density", spec.background_density);
  synth->add_option("--baseline", spec.baseline_mm, "baseline (mm)");
  synth->add_option("--focal", spec.focal_px, "focal length (px)");
  synth->add_option("--count", count, "number of scenes (seeds seed, seed+1, ...)")->check(CLI::PositiveNumber);
  synth->add_option("--seed", seed, "random seed");
  synth->add_flag("--depth-rig", depth_rig, "also emit a depth map, calibration and expected registration");
  synth->add_option("--rig", rig_file, "calibration file whose [rig] is used with --depth-rig (default identity)")
      ->check(CLI::ExistingFile);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (jobs > 0) omp_set_num_threads(jobs);

  try {
    if (chain->parsed()) {
      const CalibrationFile mech = read_calibration(chain_mech);
      const CalibrationFile zed = read_calibration(chain_zed.empty() ? chain_mech : chain_zed);
      const auto& mruns = mech.extrinsic_runs("mech");
      const auto& zruns = zed.extrinsic_runs("zed");
      if (mruns.size() != zruns.size()) {
        throw Error(ErrorCode::kInput, "mech has " + std::to_string(mruns.size()) + " runs, zed has " +
                                           std::to_string(zruns.size()));
      }
      std::vector<RigTransform> rigs;
      for (std::size_t i = 0; i < mruns.size(); ++i) rigs.push_back(chain_extrinsics(mruns[i], zruns[i]));
      const RigTransform mean = average_rig(rigs);
      CalibrationFile result;
      result.cameras = mech.cameras;
      result.cameras.insert(zed.cameras.begin(), zed.cameras.end());
      result.stereo = zed.stereo ? zed.stereo : mech.stereo;
      result.rigs = {mean};
      write_calibration(chain_out, result);
      out << "# chained " << rigs.size() << " calibration run(s)\n";
      double spread = 0.0;
      for (const auto& r : rigs) spread = std::max(spread, rotation_angle_between(r.R, mean.R));
      print_rig(out, "averaged rig (depth camera -> stereo left):", mean);
      out << "max rotation deviation from mean: " << spread << " rad\n";
      return kExitOk;
    }

    if (cerr_cmd->parsed()) {
      const CalibrationFile calib = read_calibration(cerr_calib);
      const Intrinsics& km = calib.camera("mech");
      const Intrinsics& kz = calib.camera("zed");
      const RigTransform rig = rig_from(calib);
      std::vector<CornerSet> sets;
      if (sim_trials > 0) {
        ChessboardSimulation sim;
        sim.seed = seed;
        sim.detection_noise_px = noise_sigma_for_mean_error(sim_mean);
        sets = simulate_corner_trials(rig, km, kz, sim, sim_trials);
      } else {
        if (corner_files.empty()) throw CLI::RequiredError("--corners or --simulate");
        for (const auto& f : corner_files) sets.push_back(read_corner_file(f));
      }
      std::vector<RegistrationErrorStats> stats;
      for (const auto& s : sets) stats.push_back(registration_error(s, rig, km, kz));
      const TrialSummary summary = summarize_trials(stats);
      char buf[128];
      out << "trial  corners  mean(px)  max(px)\n";
      for (std::size_t i = 0; i < stats.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%5zu  %7zu  %8.4f  %7.4f\n", i + 1, stats[i].errors.size(),
                      stats[i].mean, stats[i].max);
        out << buf;
      }
      std::snprintf(buf, sizeof(buf), "all    %7s  %8.4f  %7.4f\n", "", summary.mean, summary.max);
      out << buf;
      if (!cerr_csv.empty()) {
        std::ofstream csv(cerr_csv);
        csv << "trial,corner,error_px\n";
        for (std::size_t t = 0; t < stats.size(); ++t) {
          for (std::size_t i = 0; i < stats[t].errors.size(); ++i) {
            csv << t + 1 << ',' << i << ',' << stats[t].errors[i] << '\n';
          }
        }
      }
      return kExitOk;
    }

    if (reg->parsed()) {
      const CalibrationFile calib = read_calibration(reg_calib);
      if (!calib.stereo) throw Error(ErrorCode::kNotFound, "calibration has no [stereo] section");
      const RigTransform rig = rig_from(calib);
      const auto files = list_files(reg_in, {".png", ".tiff", ".tif"});
      fs::create_directories(reg_out);
      for (const auto& f : files) {
        const DepthMap depth = read_depth(f);
        const int w = reg_w > 0 ? reg_w : depth.width();
        const int h = reg_h > 0 ? reg_h : depth.height();
        const Registration r =
            register_depth(depth, rig, calib.camera("mech"), calib.camera("zed"), *calib.stereo, w, h);
        const std::string stem = f.stem().string();
        if (reg_format != "png") write_disparity(fs::path(reg_out) / (stem + ".tiff"), r.disparity, out);
        if (reg_format != "tiff") write_disparity(fs::path(reg_out) / (stem + ".png"), r.disparity, out);
        char buf[160];
        std::snprintf(buf, sizeof(buf), "%s: hit ratio %.4f, density %.4f\n", stem.c_str(), r.hit_ratio(),
                      density(r.disparity));
        out << buf;
        if (r.warning) err << "warning: " << stem << ": " << *r.warning << "\n";
      }
      return kExitOk;
    }

    if (conv->parsed()) {
      const DisparityMap d = read_disparity(conv_in);
      write_disparity(conv_out, d, out);
      return kExitOk;
    }

    if (match->parsed()) {
      BmConfig bm;
      SgmConfig sgm;
      bm.d_max = sgm.d_max = d_max;
      if (block_size > 0) (method == "bm" ? bm.block_size : sgm.block_size) = block_size;
      sgm.p1 = p1;
      sgm.p2 = p2;
      sgm.lr_max_diff = lr_max_diff;
      sgm.num_paths = paths;
      if (method == "bm") {
        validate(bm);
        out << "# bm: block_size=" << bm.block_size << " d_max=" << bm.d_max << "\n";
      } else {
        validate(sgm);
        out << "# sgm: block_size=" << sgm.block_size << " census=" << 2 * sgm.census_radius + 1 << "x"
            << 2 * sgm.census_radius + 1 << " p1=" << sgm.p1 << " p2=" << sgm.p2
            << " lr_max_diff=" << sgm.lr_max_diff << " d_max=" << sgm.d_max << " paths=" << sgm.num_paths << "\n";
      }
      const std::optional<Size2> crop_size = crop_arg.empty() ? std::nullopt : std::optional(parse_size(crop_arg));
      const std::optional<Size2> pad_size = pad_arg.empty() ? std::nullopt : std::optional(parse_size(pad_arg));

      auto run_one = [&](StereoSample s, const fs::path& pred_out, const fs::path& gt_out) {
        if (crop_size) {
          const CropWindow win =
              random_crop_window(s.left.width(), s.left.height(), crop_size->height, crop_size->width, seed);
          out << "# crop x=" << win.x << " y=" << win.y << " " << win.height << "x" << win.width << "\n";
          s = crop(s, win);
        }
        const int h0 = s.left.height();
        const int w0 = s.left.width();
        if (pad_size) s = pad_to(s, pad_size->height, pad_size->width);
        const GrayImage l = to_gray(s.left);
        const GrayImage r = to_gray(s.right);
        DisparityMap d = method == "bm" ? match_bm(l, r, bm) : match_sgm(l, r, sgm);
        if (pad_size) d = unpad_top_right(d, h0, w0);
        write_disparity(pred_out, d, out);
        if (crop_size && s.ground_truth && !gt_out.empty()) write_disparity(gt_out, *s.ground_truth, out);
        out << pred_out.string() << ": density " << density(d) << "\n";
      };

      if (!left_path.empty() || !right_path.empty()) {
        if (left_path.empty() || right_path.empty()) throw CLI::RequiredError("--left and --right");
        StereoSample s;
        s.left = read_rgb(left_path);
        s.right = read_rgb(right_path);
        run_one(std::move(s), match_out, {});
        return kExitOk;
      }
      if (root.empty()) {
        if (const char* env = std::getenv("STEREO_GT_ROOT")) root = env;
      }
      if (root.empty() || subset.empty()) {
        throw CLI::RequiredError("--left/--right, or --subset with --root or STEREO_GT_ROOT");
      }
      const DatasetManifest manifest = load_manifest(root);
      const Split sp = parse_split(split);
      const int n = manifest.find(subset).count(sp);
      const int first = index >= 0 ? index : 0;
      const int last = index >= 0 ? index + 1 : n;
      for (int i = first; i < last; ++i) {
        StereoSample s = load_sample(root, subset, sp, i, manifest);
        char name[32];
        std::snprintf(name, sizeof(name), "%06d.tiff", i);
        run_one(std::move(s), fs::path(match_out) / name, fs::path(match_out) / "gt" / name);
      }
      return kExitOk;
    }

    if (eval->parsed()) {
      EvalConfig cfg;
      cfg.d_max = eval_dmax;
      cfg.deltas = parse_deltas(deltas_arg);
      cfg.invalid_error_cap = cap;
      validate(cfg);
      SetReport report;
      if (fs::is_directory(pred_path) != fs::is_directory(gt_path)) {
        throw Error(ErrorCode::kPairing, "--pred and --gt must both be files or both directories");
      }
      if (fs::is_directory(gt_path)) {
        report = evaluate_set(pred_path, gt_path, cfg);
      } else {
        const DisparityMap pred = read_disparity(pred_path);
        const DisparityMap gt = read_disparity(gt_path);
        report.per_image.push_back(make_report(accumulate_errors(pred, gt, cfg), cfg, fs::path(gt_path).stem().string()));
        report.aggregate = report.per_image.front();
        report.aggregate.name = "all";
      }
      out << "# d_max=" << cfg.d_max << " invalid_cap=" << cfg.cap() << "\n";
      out << format_table(report);
      if (!json_out.empty()) {
        std::ofstream js(json_out);
        if (!js) throw Error(ErrorCode::kIo, "cannot write " + json_out);
        js << to_json(report, cfg);
      }
      return kExitOk;
    }

    if (analyze->parsed()) {
      const auto files = list_files(an_in, {".png", ".tiff", ".tif"});
      // Pool all maps into one column so the histogram covers the set.
      std::vector<float> pooled;
      char buf[160];
      out << "image             density   min(px)   max(px)\n";
      for (const auto& f : files) {
        const DisparityMap d = read_disparity(f);
        float lo = std::numeric_limits<float>::infinity(), hi = 0.0f;
        for (float v : d.data()) {
          if (!DisparityMap::is_valid_value(v)) continue;
          pooled.push_back(v);
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
        std::snprintf(buf, sizeof(buf), "%-16s  %7.4f  %8.3f  %8.3f\n", f.stem().string().c_str(), density(d),
                      std::isinf(lo) ? 0.0 : lo, hi);
        out << buf;
      }
      DisparityMap column(1, static_cast<int>(pooled.size()));
      std::copy(pooled.begin(), pooled.end(), column.data().begin());
      const DisparityHistogram hist = histogram(column, bin_width);
      std::snprintf(buf, sizeof(buf), "range %.3f .. %.3f px over %zu valid pixels, %zu bins\n", hist.min_disparity,
                    hist.max_disparity, hist.count, hist.frequencies.size());
      out << buf;
      if (!an_csv.empty()) {
        std::ofstream csv(an_csv);
        if (!csv) throw Error(ErrorCode::kIo, "cannot write " + an_csv);
        csv << histogram_csv(hist);
      }
      return kExitOk;
    }

    if (synth->parsed()) {
      if (!spec_file.empty()) {
        const SceneSpec base = read_scene_spec(spec_file);
        // flags given on the command line override the file
        auto keep = [&](const char* flag, auto& field_ref, const auto& file_value) {
          if (synth->count(flag) == 0) field_ref = file_value;
        };
        keep("--width", spec.width, base.width);
        keep("--height", spec.height, base.height);
        keep("--disparity", spec.disparity, base.disparity);
        keep("--near-disparity", spec.near_disparity, base.near_disparity);
        keep("--ramp-dx", spec.ramp_dx, base.ramp_dx);
        keep("--ramp-dy", spec.ramp_dy, base.ramp_dy);
        keep("--density", spec.dot_density, base.dot_density);
        keep("--background-density", spec.background_density, base.background_density);
        keep("--baseline", spec.baseline_mm, base.baseline_mm);
        keep("--focal", spec.focal_px, base.focal_px);
        keep("--seed", seed, base.seed);
        if (synth->count("--field") == 0) field = std::string(to_string(base.field));
        spec.leaf_count = base.leaf_count;
        spec.d_max = base.d_max;
      }
      spec.field = parse_field_kind(field);
      RigTransform rig;
      if (!rig_file.empty()) rig = rig_from(read_calibration(rig_file));
      const fs::path dir(synth_out);
      for (int i = 0; i < count; ++i) {
        SceneSpec s = spec;
        s.seed = seed + static_cast<std::uint64_t>(i);
        char name[32];
        std::snprintf(name, sizeof(name), "%06d", i);
        StereoSample sample = synth_stereo(s);
        for (const char* sub : {"left", "right", "disp"}) fs::create_directories(dir / sub);
        write_png(dir / "left" / (std::string(name) + ".png"), sample.left);
        write_png(dir / "right" / (std::string(name) + ".png"), sample.right);
        write_disparity_subpixel(dir / "disp" / (std::string(name) + ".tiff"), *sample.ground_truth);
        if (depth_rig) {
          const DepthRigScene scene = synth_depth_rig(s, rig);
          fs::create_directories(dir / "depth");
          fs::create_directories(dir / "expected");
          write_depth_tiff(dir / "depth" / (std::string(name) + ".tiff"), scene.depth);
          write_disparity_subpixel(dir / "expected" / (std::string(name) + ".tiff"), scene.expected);
          if (i == 0) {
            CalibrationFile calib;
            calib.cameras["mech"] = scene.k_mech;
            calib.cameras["zed"] = scene.k_zed;
            calib.stereo = scene.geom;
            calib.rigs = {scene.rig};
            write_calibration(dir / "calib.txt", calib);
          }
        }
        if (i == 0) {
          std::ofstream sf(dir / "scene.txt");
          sf << format_scene_spec(s);
        }
        out << name << ": " << to_string(s.field) << " " << s.width << "x" << s.height
            << ", ground-truth density " << density(*sample.ground_truth) << "\n";
      }
      return kExitOk;
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace stereogt
