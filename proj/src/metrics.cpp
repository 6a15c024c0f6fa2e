#include "stereogt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include <json.hpp>

#include "stereogt/dataset_io.hpp"
#include "stereogt/error.hpp"

namespace stereogt {

void validate(const EvalConfig& cfg) {
  if (!(cfg.d_max > 0.0)) throw Error(ErrorCode::kInput, "d_max must be positive");
  if (cfg.deltas.empty()) throw Error(ErrorCode::kInput, "at least one delta is required");
  for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
    if (!(cfg.deltas[i] > 0.0)) throw Error(ErrorCode::kInput, "deltas must be positive");
    if (i > 0 && cfg.deltas[i] <= cfg.deltas[i - 1]) {
      throw Error(ErrorCode::kInput, "deltas must be sorted ascending");
    }
  }
}

void ErrorSums::merge(const ErrorSums& other) {
  if (bad.size() < other.bad.size()) bad.resize(other.bad.size(), 0);
  valid += other.valid;
  total_pixels += other.total_pixels;
  invalid_predictions += other.invalid_predictions;
  for (std::size_t i = 0; i < other.bad.size(); ++i) bad[i] += other.bad[i];
  abs_sum += other.abs_sum;
  sq_sum += other.sq_sum;
}

namespace {

bool gt_valid(float g, double d_max) { return g > 0.0f && static_cast<double>(g) < d_max; }

void check_shapes(const DisparityMap& pred, const DisparityMap& gt) {
  if (pred.width() != gt.width() || pred.height() != gt.height()) {
    throw Error(ErrorCode::kDimension, "prediction and ground truth differ in size");
  }
}

}  // namespace

Image<std::uint8_t> valid_mask(const DisparityMap& gt, double d_max) {
  Image<std::uint8_t> mask(gt.width(), gt.height());
  auto src = gt.data();
  auto dst = mask.data();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = gt_valid(src[i], d_max) ? 1 : 0;
  return mask;
}

ErrorSums accumulate_errors(const DisparityMap& pred, const DisparityMap& gt, const EvalConfig& cfg) {
  validate(cfg);
  check_shapes(pred, gt);
  ErrorSums s;
  s.total_pixels = gt.pixel_count();
  s.bad.assign(cfg.deltas.size(), 0);
  const double cap = cfg.cap();
  auto p = pred.data();
  auto g = gt.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!gt_valid(g[i], cfg.d_max)) continue;
    ++s.valid;
    double err = cap;
    bool invalid = !DisparityMap::is_valid_value(p[i]);
    if (invalid) {
      ++s.invalid_predictions;
    } else {
      err = std::abs(static_cast<double>(p[i]) - static_cast<double>(g[i]));
    }
    for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
      if (invalid || err > cfg.deltas[k]) ++s.bad[k];
    }
    s.abs_sum += err;
    s.sq_sum += err * err;
  }
  return s;
}

MetricsReport make_report(const ErrorSums& sums, const EvalConfig& cfg, std::string name) {
  if (sums.valid == 0) throw Error(ErrorCode::kEmptyEvaluation, "no valid ground-truth pixels");
  MetricsReport r;
  r.name = std::move(name);
  r.deltas = cfg.deltas;
  const double n = static_cast<double>(sums.valid);
  for (std::size_t k = 0; k < cfg.deltas.size(); ++k) {
    r.bad_percent.push_back(100.0 * static_cast<double>(sums.bad[k]) / n);
  }
  r.epe = sums.abs_sum / n;
  r.rmse = std::sqrt(sums.sq_sum / n);
  r.valid_pixels = sums.valid;
  r.density = sums.total_pixels == 0 ? 0.0 : n / static_cast<double>(sums.total_pixels);
  r.prediction_coverage = static_cast<double>(sums.valid - sums.invalid_predictions) / n;
  return r;
}

MetricsReport evaluate(const DisparityMap& pred, const DisparityMap& gt, const EvalConfig& cfg) {
  return make_report(accumulate_errors(pred, gt, cfg), cfg);
}

double bad_delta(const DisparityMap& pred, const DisparityMap& gt, double delta, double d_max) {
  EvalConfig cfg;
  cfg.d_max = d_max;
  cfg.deltas = {delta};
  return evaluate(pred, gt, cfg).bad_percent.front();
}

double epe(const DisparityMap& pred, const DisparityMap& gt, double d_max) {
  EvalConfig cfg;
  cfg.d_max = d_max;
  return evaluate(pred, gt, cfg).epe;
}

double rmse(const DisparityMap& pred, const DisparityMap& gt, double d_max) {
  EvalConfig cfg;
  cfg.d_max = d_max;
  return evaluate(pred, gt, cfg).rmse;
}

namespace {

bool is_disparity_file(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".tiff" || ext == ".tif" || ext == ".png";
}

int extension_rank(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  return ext == ".png" ? 1 : 0;
}

std::map<std::string, std::filesystem::path> index_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorCode::kPairing, dir.string() + " is not a directory");
  }
  std::map<std::string, std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || !is_disparity_file(entry.path())) continue;
    const std::string stem = entry.path().stem().string();
    auto it = files.find(stem);
    if (it == files.end() || extension_rank(entry.path()) < extension_rank(it->second)) {
      files[stem] = entry.path();
    }
  }
  return files;
}

}  // namespace

SetReport evaluate_set(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                       const EvalConfig& cfg) {
  validate(cfg);
  const auto preds = index_dir(pred_dir);
  const auto gts = index_dir(gt_dir);
  if (gts.empty()) throw Error(ErrorCode::kPairing, "no ground-truth files in " + gt_dir.string());
  for (const auto& [stem, path] : gts) {
    if (!preds.contains(stem)) throw Error(ErrorCode::kPairing, "no prediction for " + path.string());
  }
  for (const auto& [stem, path] : preds) {
    if (!gts.contains(stem)) throw Error(ErrorCode::kPairing, "no ground truth for " + path.string());
  }

  std::vector<std::string> stems;
  for (const auto& kv : gts) stems.push_back(kv.first);
  std::vector<ErrorSums> sums(stems.size());
  std::vector<std::string> errors(stems.size());
  const auto n = static_cast<long>(stems.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      const DisparityMap pred = read_disparity(preds.at(stems[i]));
      const DisparityMap gt = read_disparity(gts.at(stems[i]));
      sums[i] = accumulate_errors(pred, gt, cfg);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i].empty()) throw Error(ErrorCode::kInput, stems[i] + ": " + errors[i]);
  }

  SetReport out;
  ErrorSums pooled;
  pooled.bad.assign(cfg.deltas.size(), 0);
  for (std::size_t i = 0; i < stems.size(); ++i) {
    pooled.merge(sums[i]);
    if (sums[i].valid == 0) continue;  // contributes nothing to the pool
    out.per_image.push_back(make_report(sums[i], cfg, stems[i]));
  }
  out.aggregate = make_report(pooled, cfg, "all");
  return out;
}

DisparityHistogram histogram(const DisparityMap& gt, double bin_width) {
  if (!(bin_width > 0.0)) throw Error(ErrorCode::kInput, "bin width must be positive");
  DisparityHistogram h;
  double lo = 0.0, hi = 0.0;
  for (float v : gt.data()) {
    if (!DisparityMap::is_valid_value(v)) continue;
    if (h.count == 0) {
      lo = hi = v;
    } else {
      lo = std::min(lo, static_cast<double>(v));
      hi = std::max(hi, static_cast<double>(v));
    }
    ++h.count;
  }
  if (h.count == 0) throw Error(ErrorCode::kEmptyEvaluation, "no valid disparities");
  h.min_disparity = lo;
  h.max_disparity = hi;
  const double first = std::floor(lo / bin_width) * bin_width;
  const auto bins = static_cast<std::size_t>(std::floor((hi - first) / bin_width)) + 1;
  std::vector<std::size_t> counts(bins, 0);
  for (float v : gt.data()) {
    if (!DisparityMap::is_valid_value(v)) continue;
    auto b = static_cast<std::size_t>(std::floor((v - first) / bin_width));
    counts[std::min(b, bins - 1)]++;
  }
  for (std::size_t b = 0; b <= bins; ++b) h.edges.push_back(first + static_cast<double>(b) * bin_width);
  for (std::size_t c : counts) {
    h.frequencies.push_back(static_cast<double>(c) / static_cast<double>(h.count));
  }
  return h;
}

std::string format_table(const SetReport& report) {
  std::ostringstream out;
  char buf[64];
  auto row = [&](const MetricsReport& r) {
    std::snprintf(buf, sizeof(buf), "%-16s", r.name.c_str());
    out << buf;
    for (double b : r.bad_percent) {
      std::snprintf(buf, sizeof(buf), " %10.2f", b);
      out << buf;
    }
    std::snprintf(buf, sizeof(buf), " %8.2f %8.2f %10zu %8.4f\n", r.epe, r.rmse, r.valid_pixels,
                  r.density);
    out << buf;
  };
  std::snprintf(buf, sizeof(buf), "%-16s", "image");
  out << buf;
  for (double d : report.aggregate.deltas) {
    char label[32];
    std::snprintf(label, sizeof(label), "bad-%g(%%)", d);
    std::snprintf(buf, sizeof(buf), " %10s", label);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), " %8s %8s %10s %8s\n", "EPE", "RMSE", "N", "density");
  out << buf;
  for (const auto& r : report.per_image) row(r);
  row(report.aggregate);
  return out.str();
}

namespace {

nlohmann::json report_json(const MetricsReport& r) {
  nlohmann::json j;
  j["name"] = r.name;
  nlohmann::json bad = nlohmann::json::object();
  for (std::size_t k = 0; k < r.deltas.size(); ++k) {
    std::ostringstream key;
    key << r.deltas[k];
    bad[key.str()] = r.bad_percent[k];
  }
  j["bad_percent"] = bad;
  j["epe"] = r.epe;
  j["rmse"] = r.rmse;
  j["valid_pixels"] = r.valid_pixels;
  j["density"] = r.density;
  j["prediction_coverage"] = r.prediction_coverage;
  return j;
}

}  // namespace

std::string to_json(const SetReport& report, const EvalConfig& cfg) {
  nlohmann::json j;
  j["config"] = {{"d_max", cfg.d_max}, {"deltas", cfg.deltas}, {"invalid_error_cap", cfg.cap()}};
  j["aggregate"] = report_json(report.aggregate);
  j["images"] = nlohmann::json::array();
  for (const auto& r : report.per_image) j["images"].push_back(report_json(r));
  return j.dump(2) + "\n";
}

std::string histogram_csv(const DisparityHistogram& h) {
  std::ostringstream out;
  out << "bin_low,bin_high,frequency\n";
  char buf[96];
  for (std::size_t b = 0; b < h.frequencies.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.9g\n", h.edges[b], h.edges[b + 1], h.frequencies[b]);
    out << buf;
  }
  return out.str();
}

}  // namespace stereogt
