#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "stereogt/image.hpp"

namespace stereogt {

struct EvalConfig {
  double d_max = 256.0;
  std::vector<double> deltas{1.0, 3.0, 5.0};
  // Error charged to an invalid prediction at a valid ground-truth pixel;
  // a negative value means "use d_max".
  double invalid_error_cap = -1.0;

  double cap() const noexcept { return invalid_error_cap < 0.0 ? d_max : invalid_error_cap; }
};

void validate(const EvalConfig& cfg);

// Raw sums over the ground-truth pixels with 0 < gt < d_max.
struct ErrorSums {
  std::size_t valid = 0;               // N
  std::size_t total_pixels = 0;
  std::size_t invalid_predictions = 0;  // counted inside N
  std::vector<std::size_t> bad;        // one per delta
  double abs_sum = 0.0;
  double sq_sum = 0.0;

  void merge(const ErrorSums& other);
};

struct MetricsReport {
  std::string name;
  std::vector<double> deltas;
  std::vector<double> bad_percent;  // bad-delta in [0, 100]
  double epe = 0.0;
  double rmse = 0.0;
  std::size_t valid_pixels = 0;
  double density = 0.0;       // N / pixel count of the ground truth
  double prediction_coverage = 0.0;  // fraction of the N pixels with a valid prediction
};

// True where 0 < gt < d_max.
Image<std::uint8_t> valid_mask(const DisparityMap& gt, double d_max);

// One serial row-major pass; the summation order is part of the contract so
// results reproduce exactly.
ErrorSums accumulate_errors(const DisparityMap& pred, const DisparityMap& gt, const EvalConfig& cfg);
// Throws kEmptyEvaluation when N == 0.
MetricsReport make_report(const ErrorSums& sums, const EvalConfig& cfg, std::string name = {});

MetricsReport evaluate(const DisparityMap& pred, const DisparityMap& gt, const EvalConfig& cfg);
double bad_delta(const DisparityMap& pred, const DisparityMap& gt, double delta, double d_max);
double epe(const DisparityMap& pred, const DisparityMap& gt, double d_max);
double rmse(const DisparityMap& pred, const DisparityMap& gt, double d_max);

struct SetReport {
  std::vector<MetricsReport> per_image;  // sorted by file stem
  MetricsReport aggregate;               // pixel-pooled
};

// Pairs files by stem (.tiff/.tif preferred over .png). A file without a
// counterpart, or an empty directory, is a kPairing error. Images are scored
// in parallel and merged in stem order.
SetReport evaluate_set(const std::filesystem::path& pred_dir, const std::filesystem::path& gt_dir,
                       const EvalConfig& cfg);

struct DisparityHistogram {
  std::vector<double> edges;        // bins.size() + 1 entries
  std::vector<double> frequencies;  // sum to 1
  double min_disparity = 0.0;
  double max_disparity = 0.0;
  std::size_t count = 0;
};

DisparityHistogram histogram(const DisparityMap& gt, double bin_width);

std::string format_table(const SetReport& report);
std::string to_json(const SetReport& report, const EvalConfig& cfg);
std::string histogram_csv(const DisparityHistogram& h);

}  // namespace stereogt
