#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "stereogt/image.hpp"

namespace stereogt {

struct BmConfig {
  int block_size = 15;
  int d_max = 256;
};

struct SgmConfig {
  int block_size = 3;  // cost summation window
  int census_radius = 2;  // 5x5 census window
  int p1 = 216;
  int p2 = 864;
  double lr_max_diff = 1.0;  // infinity disables the check
  int d_max = 256;
  int num_paths = 8;
};

void validate(const BmConfig& cfg);
void validate(const SgmConfig& cfg);

// Matching costs laid out [y][x][d], d fastest.
class CostVolume {
 public:
  CostVolume() = default;
  CostVolume(int width, int height, int disparities, std::uint16_t fill = 0);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int disparities() const noexcept { return disparities_; }

  std::uint16_t& at(int x, int y, int d) noexcept { return data_[index(x, y) + d]; }
  std::uint16_t at(int x, int y, int d) const noexcept { return data_[index(x, y) + d]; }
  std::span<std::uint16_t> pixel(int x, int y) noexcept {
    return {data_.data() + index(x, y), static_cast<std::size_t>(disparities_)};
  }
  std::span<const std::uint16_t> pixel(int x, int y) const noexcept {
    return {data_.data() + index(x, y), static_cast<std::size_t>(disparities_)};
  }
  std::span<std::uint16_t> data() noexcept { return data_; }
  std::span<const std::uint16_t> data() const noexcept { return data_; }

  bool operator==(const CostVolume&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return (static_cast<std::size_t>(y) * width_ + x) * disparities_;
  }

  int width_ = 0;
  int height_ = 0;
  int disparities_ = 0;
  std::vector<std::uint16_t> data_;
};

inline constexpr std::uint16_t kBmSentinelCost = std::numeric_limits<std::uint16_t>::max();

// Census descriptor: bit set where a window neighbour is darker than the
// centre. Coordinates outside the image are clamped to the border.
Image<std::uint32_t> census_transform(const GrayImage& img, int radius);

// Largest finite census block cost; also the out-of-range sentinel.
int census_max_cost(const SgmConfig& cfg);

// BM: sum of absolute differences over the block. Candidates whose block
// leaves the right image get kBmSentinelCost.
CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, const BmConfig& cfg);

// SGM: census Hamming distance summed over the block. Candidates with
// u - d < 0 get census_max_cost(cfg).
CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg);

// Sum over cfg.num_paths scanline directions of
//   L_r(p,d) = C(p,d) + min(L_r(p-r,d), L_r(p-r,d+-1) + P1, min_k L_r(p-r,k) + P2)
//              - min_k L_r(p-r,k)
// saturated to 65535.
CostVolume aggregate_costs(const CostVolume& cv, const SgmConfig& cfg);

// Winner-take-all over candidates inside the right image (d <= u - margin),
// ties toward the smaller disparity. With subpixel, a parabola through the
// three costs around the winner refines it unless the winner sits on a range
// boundary or the curvature is not positive.
DisparityMap winner_take_all(const CostVolume& cv, int right_margin, bool subpixel);

DisparityMap match_bm(const GrayImage& left, const GrayImage& right, const BmConfig& cfg);

// Census cost, aggregation, sub-pixel WTA; no consistency check.
DisparityMap match_sgm_left(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg);
// Right-view disparity by re-matching the mirrored, swapped pair.
DisparityMap match_sgm_right(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg);
// Full pipeline including the left-right consistency check.
DisparityMap match_sgm(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg);

// Keeps p only if |d_left(p) - d_right(p - d_left(p))| <= max_diff, with a
// nearest-pixel lookup in the right view.
DisparityMap lr_consistency_check(const DisparityMap& d_left, const DisparityMap& d_right,
                                  double max_diff);

namespace serial {
// Direct per-cell reference versions of the parallel kernels above.
CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, const BmConfig& cfg);
CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg);
CostVolume aggregate_costs(const CostVolume& cv, const SgmConfig& cfg);
}  // namespace serial

}  // namespace stereogt
