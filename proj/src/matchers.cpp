#include "stereogt/matchers.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <type_traits>
#include <vector>

#include "stereogt/error.hpp"

namespace stereogt {

namespace {

constexpr std::int32_t kFarCost = 1 << 29;
constexpr std::int32_t kSaturated = std::numeric_limits<std::uint16_t>::max();

// (dx, dy) of the scanline directions; the first four are the 4-path set.
constexpr std::array<std::array<int, 2>, 8> kPathDirections{{
    {1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, 1}, {1, -1}, {-1, -1},
}};

inline int clamp_index(int v, int n) { return v < 0 ? 0 : (v >= n ? n - 1 : v); }

void check_pair(const GrayImage& left, const GrayImage& right) {
  if (left.channels() != 1 || right.channels() != 1) {
    throw Error(ErrorCode::kInput, "matching expects single-channel images");
  }
  if (left.width() != right.width() || left.height() != right.height()) {
    throw Error(ErrorCode::kInput, "left and right images differ in size");
  }
  if (left.empty()) throw Error(ErrorCode::kInput, "empty images");
}

// Block-summed cost volume. pixel_cost(x, y, d) must accept any x, y inside
// the image and clamp x - d itself. Column sums roll down each row chunk so
// the work per cell does not grow with the block height; all sums are exact
// integers, so the chunking does not change the result.
template <typename PixelCost>
void block_cost_volume(CostVolume& cv, int radius, int right_margin, std::uint16_t sentinel,
                       PixelCost pixel_cost) {
  const int w = cv.width();
  const int h = cv.height();
  const int nd = cv.disparities();
  constexpr int kChunk = 32;
  const int chunks = (h + kChunk - 1) / kChunk;

#pragma omp parallel
  {
    std::vector<std::int32_t> colsum(static_cast<std::size_t>(w) * nd);
    std::vector<std::int32_t> run(static_cast<std::size_t>(nd));

    auto add_row = [&](int yy, int sign) {
      for (int x = 0; x < w; ++x) {
        std::int32_t* col = colsum.data() + static_cast<std::size_t>(x) * nd;
        for (int d = 0; d < nd; ++d) col[d] += sign * pixel_cost(x, yy, d);
      }
    };

#pragma omp for schedule(static)
    for (int c = 0; c < chunks; ++c) {
      const int y0 = c * kChunk;
      const int y1 = std::min(h, y0 + kChunk);
      for (int y = y0; y < y1; ++y) {
        if (y == y0) {
          std::fill(colsum.begin(), colsum.end(), 0);
          for (int dy = -radius; dy <= radius; ++dy) add_row(clamp_index(y + dy, h), 1);
        } else {
          add_row(clamp_index(y + radius, h), 1);
          add_row(clamp_index(y - 1 - radius, h), -1);
        }
        std::fill(run.begin(), run.end(), 0);
        for (int dx = -radius; dx <= radius; ++dx) {
          const std::int32_t* col = colsum.data() + static_cast<std::size_t>(clamp_index(dx, w)) * nd;
          for (int d = 0; d < nd; ++d) run[d] += col[d];
        }
        for (int x = 0; x < w; ++x) {
          std::uint16_t* out = cv.pixel(x, y).data();
          const int last = std::min(nd - 1, x - right_margin);
          for (int d = 0; d <= last; ++d) {
            out[d] = static_cast<std::uint16_t>(std::min<std::int32_t>(run[d], kSaturated - 1));
          }
          for (int d = std::max(last + 1, 0); d < nd; ++d) out[d] = sentinel;
          const std::int32_t* add = colsum.data() + static_cast<std::size_t>(clamp_index(x + radius + 1, w)) * nd;
          const std::int32_t* sub = colsum.data() + static_cast<std::size_t>(clamp_index(x - radius, w)) * nd;
          for (int d = 0; d < nd; ++d) run[d] += add[d] - sub[d];
        }
      }
    }
  }
}

// One recurrence step. prev/cur hold nd + 2 entries with far-cost guards at
// both ends; prev == nullptr starts a path. L is int16_t when every path value
// provably fits (see narrow_paths), int32_t otherwise; results are identical.
template <typename L>
inline void path_step(const std::uint16_t* cost, const L* prev, L* cur, std::uint16_t* sum, int nd,
                      L p1, L p2) {
  if (prev == nullptr) {
    for (int d = 0; d < nd; ++d) cur[d + 1] = static_cast<L>(cost[d]);
  } else {
    L min_prev = prev[1];
    for (int d = 2; d <= nd; ++d) min_prev = std::min(min_prev, prev[d]);
    const L jump = static_cast<L>(min_prev + p2);
    for (int d = 1; d <= nd; ++d) {
      const L step = static_cast<L>(std::min(prev[d - 1], prev[d + 1]) + p1);
      const L best = std::min(std::min(prev[d], step), jump);
      cur[d] = static_cast<L>(cost[d - 1] + best - min_prev);
    }
  }
  for (int d = 0; d < nd; ++d) {
    sum[d] = static_cast<std::uint16_t>(std::min<std::int32_t>(sum[d] + cur[d + 1], kSaturated));
  }
}

template <typename L>
constexpr L far_cost() {
  if constexpr (std::is_same_v<L, std::int16_t>) {
    return 8192;
  } else {
    return kFarCost;
  }
}

// Every L value lies in [0, max_cost + P2]; the guards add at most P1 on top.
bool narrow_paths(const CostVolume& cv, const SgmConfig& cfg) {
  std::int32_t max_cost = 0;
  for (std::uint16_t c : cv.data()) max_cost = std::max<std::int32_t>(max_cost, c);
  return max_cost + cfg.p2 < far_cost<std::int16_t>() && far_cost<std::int16_t>() + cfg.p1 <= 32767;
}

template <typename L>
void aggregate_into(const CostVolume& cv, const SgmConfig& cfg, CostVolume& sum) {
  const int w = cv.width();
  const int h = cv.height();
  const int nd = cv.disparities();
  const std::size_t stride = static_cast<std::size_t>(nd) + 2;
  const L p1 = static_cast<L>(cfg.p1);
  const L p2 = static_cast<L>(cfg.p2);

  for (int p = 0; p < cfg.num_paths; ++p) {
    const int dx = kPathDirections[p][0];
    const int dy = kPathDirections[p][1];
    if (dy == 0) {
      // Rows are independent.
#pragma omp parallel
      {
        std::vector<L> a(stride, far_cost<L>()), b(stride, far_cost<L>());
#pragma omp for schedule(static)
        for (int y = 0; y < h; ++y) {
          L* prev = nullptr;
          L* cur = a.data();
          for (int i = 0; i < w; ++i) {
            const int x = dx > 0 ? i : w - 1 - i;
            path_step<L>(cv.pixel(x, y).data(), prev, cur, sum.pixel(x, y).data(), nd, p1, p2);
            prev = cur;
            cur = (cur == a.data()) ? b.data() : a.data();
          }
        }
      }
    } else {
      // Row after row; pixels within a row are independent.
      std::vector<L> prev_row(stride * w, far_cost<L>()), cur_row(stride * w, far_cost<L>());
#pragma omp parallel
      {
        L* prev = prev_row.data();
        L* cur = cur_row.data();
        for (int i = 0; i < h; ++i) {
          const int y = dy > 0 ? i : h - 1 - i;
#pragma omp for schedule(static)
          for (int x = 0; x < w; ++x) {
            const int px = x - dx;
            const L* from = (i == 0 || px < 0 || px >= w) ? nullptr : prev + stride * static_cast<std::size_t>(px);
            path_step<L>(cv.pixel(x, y).data(), from, cur + stride * static_cast<std::size_t>(x),
                         sum.pixel(x, y).data(), nd, p1, p2);
          }
          std::swap(prev, cur);
        }
      }
    }
  }
}

template <typename T>
Image<T> mirror(const Image<T>& img) {
  Image<T> out(img.width(), img.height(), img.channels());
  const int w = img.width();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(w - 1 - x, y, c) = img.at(x, y, c);
    }
  }
  return out;
}

void check_penalties(const SgmConfig& cfg) {
  if (cfg.p1 < 0 || cfg.p2 < cfg.p1) throw Error(ErrorCode::kInput, "penalties need 0 <= P1 <= P2");
  if (cfg.num_paths != 4 && cfg.num_paths != 8) throw Error(ErrorCode::kInput, "num_paths must be 4 or 8");
}

}  // namespace

void validate(const BmConfig& cfg) {
  if (cfg.block_size < 3 || cfg.block_size % 2 == 0) {
    throw Error(ErrorCode::kInput, "BM block size must be odd and >= 3");
  }
  if (cfg.d_max <= 0 || cfg.d_max > 1024) throw Error(ErrorCode::kInput, "d_max must be in (0, 1024]");
}

void validate(const SgmConfig& cfg) {
  if (cfg.block_size < 1 || cfg.block_size % 2 == 0) {
    throw Error(ErrorCode::kInput, "SGM block size must be odd");
  }
  if (cfg.census_radius < 1 || cfg.census_radius > 2) {
    throw Error(ErrorCode::kInput, "census radius must be 1 or 2");
  }
  if (!(cfg.p1 > 0 && cfg.p1 < cfg.p2)) throw Error(ErrorCode::kInput, "penalties need 0 < P1 < P2");
  if (!(cfg.lr_max_diff >= 0.0)) throw Error(ErrorCode::kInput, "lr_max_diff must be >= 0");
  if (cfg.d_max <= 0 || cfg.d_max > 1024) throw Error(ErrorCode::kInput, "d_max must be in (0, 1024]");
  if (cfg.num_paths != 4 && cfg.num_paths != 8) throw Error(ErrorCode::kInput, "num_paths must be 4 or 8");
}

CostVolume::CostVolume(int width, int height, int disparities, std::uint16_t fill)
    : width_(width), height_(height), disparities_(disparities) {
  if (width < 0 || height < 0 || disparities <= 0) {
    throw Error(ErrorCode::kDimension, "invalid cost volume size");
  }
  data_.assign(static_cast<std::size_t>(width) * height * disparities, fill);
}

Image<std::uint32_t> census_transform(const GrayImage& img, int radius) {
  const int w = img.width();
  const int h = img.height();
  Image<std::uint32_t> out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::uint8_t centre = img.at(x, y);
      std::uint32_t bits = 0;
      for (int dy = -radius; dy <= radius; ++dy) {
        const std::uint8_t* row = img.row(clamp_index(y + dy, h));
        for (int dx = -radius; dx <= radius; ++dx) {
          if (dx == 0 && dy == 0) continue;
          bits = (bits << 1) | (row[clamp_index(x + dx, w)] < centre ? 1u : 0u);
        }
      }
      out.at(x, y) = bits;
    }
  }
  return out;
}

int census_max_cost(const SgmConfig& cfg) {
  const int side = 2 * cfg.census_radius + 1;
  return (side * side - 1) * cfg.block_size * cfg.block_size;
}

CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, const BmConfig& cfg) {
  check_pair(left, right);
  validate(cfg);
  CostVolume cv(left.width(), left.height(), cfg.d_max);
  const int radius = cfg.block_size / 2;
  block_cost_volume(cv, radius, radius, kBmSentinelCost, [&](int x, int y, int d) -> std::int32_t {
    const std::uint8_t* l = left.row(y);
    const std::uint8_t* r = right.row(y);
    return std::abs(static_cast<int>(l[x]) - static_cast<int>(r[x - d < 0 ? 0 : x - d]));
  });
  return cv;
}

CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg) {
  check_pair(left, right);
  validate(cfg);
  const auto cl = census_transform(left, cfg.census_radius);
  const auto cr = census_transform(right, cfg.census_radius);
  CostVolume cv(left.width(), left.height(), cfg.d_max);
  block_cost_volume(cv, cfg.block_size / 2, 0, static_cast<std::uint16_t>(census_max_cost(cfg)),
                    [&](int x, int y, int d) -> std::int32_t {
                      const std::uint32_t* l = cl.row(y);
                      const std::uint32_t* r = cr.row(y);
                      return std::popcount(l[x] ^ r[x - d < 0 ? 0 : x - d]);
                    });
  return cv;
}

CostVolume aggregate_costs(const CostVolume& cv, const SgmConfig& cfg) {
  check_penalties(cfg);
  CostVolume sum(cv.width(), cv.height(), cv.disparities(), 0);
  if (narrow_paths(cv, cfg)) {
    aggregate_into<std::int16_t>(cv, cfg, sum);
  } else {
    aggregate_into<std::int32_t>(cv, cfg, sum);
  }
  return sum;
}

DisparityMap winner_take_all(const CostVolume& cv, int right_margin, bool subpixel) {
  const int w = cv.width();
  const int h = cv.height();
  const int nd = cv.disparities();
  DisparityMap out(w, h);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int last = std::min(nd - 1, x - right_margin);
      if (last < 1) continue;
      const std::uint16_t* c = cv.pixel(x, y).data();
      int best = 0;
      for (int d = 1; d <= last; ++d) {
        if (c[d] < c[best]) best = d;
      }
      if (best == 0) continue;
      double value = best;
      if (subpixel && best < last) {
        const double lo = c[best - 1];
        const double mid = c[best];
        const double hi = c[best + 1];
        const double denom = lo - 2.0 * mid + hi;
        if (denom > 0.0) value = best + (lo - hi) / (2.0 * denom);
      }
      out.at(x, y) = static_cast<float>(value);
    }
  }
  return out;
}

DisparityMap match_bm(const GrayImage& left, const GrayImage& right, const BmConfig& cfg) {
  const CostVolume cv = compute_cost_volume(left, right, cfg);
  DisparityMap d = winner_take_all(cv, cfg.block_size / 2, false);
  const int r = cfg.block_size / 2;
  for (int y = 0; y < d.height(); ++y) {
    for (int x = 0; x < d.width(); ++x) {
      if (y < r || y >= d.height() - r || x < r || x >= d.width() - r) d.at(x, y) = 0.0f;
    }
  }
  return d;
}

DisparityMap match_sgm_left(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg) {
  validate(cfg);
  CostVolume aggregated;
  {
    const CostVolume raw = compute_cost_volume(left, right, cfg);
    aggregated = aggregate_costs(raw, cfg);
  }
  return winner_take_all(aggregated, 0, true);
}

DisparityMap match_sgm_right(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg) {
  const DisparityMap mirrored = match_sgm_left(mirror(right), mirror(left), cfg);
  return DisparityMap(mirror<float>(mirrored));
}

DisparityMap match_sgm(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg) {
  const DisparityMap dl = match_sgm_left(left, right, cfg);
  if (std::isinf(cfg.lr_max_diff)) return dl;
  const DisparityMap dr = match_sgm_right(left, right, cfg);
  return lr_consistency_check(dl, dr, cfg.lr_max_diff);
}

DisparityMap lr_consistency_check(const DisparityMap& d_left, const DisparityMap& d_right,
                                  double max_diff) {
  if (d_left.width() != d_right.width() || d_left.height() != d_right.height()) {
    throw Error(ErrorCode::kDimension, "left and right disparity maps differ in size");
  }
  if (std::isinf(max_diff) && max_diff > 0) return d_left;
  DisparityMap out(d_left.width(), d_left.height());
  const int w = d_left.width();
#pragma omp parallel for schedule(static)
  for (int y = 0; y < d_left.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      const float dl = d_left.at(x, y);
      if (!DisparityMap::is_valid_value(dl)) continue;
      const double xr = std::floor(x - static_cast<double>(dl) + 0.5);
      if (xr < 0.0 || xr >= w) continue;
      const float dr = d_right.at(static_cast<int>(xr), y);
      if (std::abs(static_cast<double>(dl) - static_cast<double>(dr)) <= max_diff) out.at(x, y) = dl;
    }
  }
  return out;
}

namespace serial {

CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, const BmConfig& cfg) {
  check_pair(left, right);
  validate(cfg);
  const int w = left.width();
  const int h = left.height();
  const int r = cfg.block_size / 2;
  CostVolume cv(w, h, cfg.d_max);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int d = 0; d < cfg.d_max; ++d) {
        if (x - d - r < 0) {
          cv.at(x, y, d) = kBmSentinelCost;
          continue;
        }
        int s = 0;
        for (int by = -r; by <= r; ++by) {
          for (int bx = -r; bx <= r; ++bx) {
            const int yy = clamp_index(y + by, h);
            const int xl = clamp_index(x + bx, w);
            const int xr = std::max(xl - d, 0);
            s += std::abs(left.at(xl, yy) - right.at(xr, yy));
          }
        }
        cv.at(x, y, d) = static_cast<std::uint16_t>(std::min(s, kSaturated - 1));
      }
    }
  }
  return cv;
}

CostVolume compute_cost_volume(const GrayImage& left, const GrayImage& right, const SgmConfig& cfg) {
  check_pair(left, right);
  validate(cfg);
  const int w = left.width();
  const int h = left.height();
  const int r = cfg.block_size / 2;
  const int cr = cfg.census_radius;
  auto census_at = [&](const GrayImage& img, int x, int y) {
    std::uint32_t bits = 0;
    for (int dy = -cr; dy <= cr; ++dy) {
      for (int dx = -cr; dx <= cr; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const bool darker = img.at(clamp_index(x + dx, w), clamp_index(y + dy, h)) < img.at(x, y);
        bits = (bits << 1) | (darker ? 1u : 0u);
      }
    }
    return bits;
  };
  CostVolume cv(w, h, cfg.d_max);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int d = 0; d < cfg.d_max; ++d) {
        if (x - d < 0) {
          cv.at(x, y, d) = static_cast<std::uint16_t>(census_max_cost(cfg));
          continue;
        }
        int s = 0;
        for (int by = -r; by <= r; ++by) {
          for (int bx = -r; bx <= r; ++bx) {
            const int yy = clamp_index(y + by, h);
            const int xl = clamp_index(x + bx, w);
            const int xr = std::max(xl - d, 0);
            s += std::popcount(census_at(left, xl, yy) ^ census_at(right, xr, yy));
          }
        }
        cv.at(x, y, d) = static_cast<std::uint16_t>(s);
      }
    }
  }
  return cv;
}

CostVolume aggregate_costs(const CostVolume& cv, const SgmConfig& cfg) {
  check_penalties(cfg);
  const int w = cv.width();
  const int h = cv.height();
  const int nd = cv.disparities();
  std::vector<std::int64_t> total(static_cast<std::size_t>(w) * h * nd, 0);
  std::vector<std::int64_t> L(total.size(), 0);
  auto idx = [&](int x, int y, int d) { return (static_cast<std::size_t>(y) * w + x) * nd + d; };

  for (int p = 0; p < cfg.num_paths; ++p) {
    const int dx = kPathDirections[p][0];
    const int dy = kPathDirections[p][1];
    // Visit order guarantees the predecessor p - r is already done.
    for (int i = 0; i < h; ++i) {
      const int y = dy >= 0 ? i : h - 1 - i;
      for (int j = 0; j < w; ++j) {
        const int x = dx >= 0 ? j : w - 1 - j;
        const int px = x - dx;
        const int py = y - dy;
        const bool start = px < 0 || px >= w || py < 0 || py >= h;
        std::int64_t min_prev = 0;
        if (!start) {
          min_prev = L[idx(px, py, 0)];
          for (int k = 1; k < nd; ++k) min_prev = std::min(min_prev, L[idx(px, py, k)]);
        }
        for (int d = 0; d < nd; ++d) {
          std::int64_t v = cv.at(x, y, d);
          if (!start) {
            std::int64_t best = L[idx(px, py, d)];
            if (d > 0) best = std::min(best, L[idx(px, py, d - 1)] + cfg.p1);
            if (d + 1 < nd) best = std::min(best, L[idx(px, py, d + 1)] + cfg.p1);
            best = std::min(best, min_prev + cfg.p2);
            v += best - min_prev;
          }
          L[idx(x, y, d)] = v;
          total[idx(x, y, d)] = std::min<std::int64_t>(total[idx(x, y, d)] + v, kSaturated);
        }
      }
    }
  }
  CostVolume out(w, h, nd);
  for (std::size_t i = 0; i < total.size(); ++i) out.data()[i] = static_cast<std::uint16_t>(total[i]);
  return out;
}

}  // namespace serial

}  // namespace stereogt
