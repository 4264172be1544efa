#pragma once

// Pupil and limbus circle fitting on a binary iris mask with a circular Hough
// transform over (cx, cy, r).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "irisforge/error.hpp"
#include "irisforge/image.hpp"

namespace irisforge {

struct Circle {
  double cx = 0.0;
  double cy = 0.0;
  double r = 1.0;

  friend bool operator==(const Circle&, const Circle&) = default;
};

struct IrisBoundaries {
  Circle pupil;
  Circle iris;
  bool pupil_synthesized = false;

  friend bool operator==(const IrisBoundaries&, const IrisBoundaries&) = default;
};

/// Pupil circle strictly smaller than and contained in the iris circle.
inline bool is_valid(const IrisBoundaries& b) {
  const auto finite = [](const Circle& c) {
    return std::isfinite(c.cx) && std::isfinite(c.cy) && std::isfinite(c.r) &&
           c.r > 0.0;
  };
  if (!finite(b.pupil) || !finite(b.iris)) return false;
  const double d = std::hypot(b.pupil.cx - b.iris.cx, b.pupil.cy - b.iris.cy);
  return b.pupil.r < b.iris.r && d + b.pupil.r <= b.iris.r + 1e-9;
}

inline void validate(const IrisBoundaries& b) {
  require(is_valid(b), ErrorCode::invalid_argument,
          "pupil circle must lie strictly inside the iris circle");
}

struct HoughConfig {
  int r_min_outer = 40;
  int r_max_outer = 160;
  int r_min_inner = 8;
  int r_max_inner = 80;
  int accumulator_step = 1;
  int radius_step = 1;
  /// Minimum peak votes as a fraction of the circle's circumference.
  double vote_floor = 0.2;
  /// Inner centres must lie within this fraction of the iris radius from the
  /// iris centre.
  double inner_center_fraction = 0.5;
  /// Radius of the stand-in pupil, relative to the iris, when no hole is found.
  double synthesized_pupil_ratio = 0.2;

  /// Outer r in [w/8, w/2], inner r in [w/40, w/4].
  static HoughConfig for_width(int width) {
    HoughConfig cfg;
    cfg.r_min_outer = std::max(1, width / 8);
    cfg.r_max_outer = std::max(cfg.r_min_outer + 1, width / 2);
    cfg.r_min_inner = std::max(1, width / 40);
    cfg.r_max_inner = std::max(cfg.r_min_inner + 1, width / 4);
    return cfg;
  }

  void validate() const {
    require(r_min_outer > 0 && r_min_outer < r_max_outer,
            ErrorCode::invalid_argument, "outer radius range must be 0 < min < max");
    require(r_min_inner > 0 && r_min_inner < r_max_inner,
            ErrorCode::invalid_argument, "inner radius range must be 0 < min < max");
    require(accumulator_step >= 1 && radius_step >= 1,
            ErrorCode::invalid_argument, "Hough steps must be >= 1");
    require(vote_floor >= 0.0 && inner_center_fraction > 0.0 &&
                synthesized_pupil_ratio > 0.0 && synthesized_pupil_ratio < 1.0,
            ErrorCode::invalid_argument, "Hough thresholds out of range");
  }
};

struct EdgePoint {
  int x = 0;
  int y = 0;

  friend bool operator==(const EdgePoint&, const EdgePoint&) = default;
};

struct RadiusRange {
  int min = 1;
  int max = 2;
};

/// Restricts candidate centres to a rectangle of the frame (inclusive pixel
/// bounds); the default covers the whole frame.
struct CenterWindow {
  int x0 = 0;
  int y0 = 0;
  int x1 = std::numeric_limits<int>::max();
  int y1 = std::numeric_limits<int>::max();
};

struct HoughResult {
  Circle circle;
  int votes = 0;
  /// votes / (2 pi r)
  double normalized_votes = 0.0;
};

/// True pixels with at least one false 4-neighbour; outside the frame is false.
inline std::vector<EdgePoint> mask_boundary(const BinaryMask& mask) {
  std::vector<EdgePoint> out;
  const auto is_true = [&](int x, int y) {
    return mask.contains(x, y) && mask.at(x, y);
  };
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      if (!is_true(x - 1, y) || !is_true(x + 1, y) || !is_true(x, y - 1) ||
          !is_true(x, y + 1)) {
        out.push_back({x, y});
      }
    }
  }
  return out;
}

/// Size of the largest 4-connected true region.
inline std::size_t largest_region(const BinaryMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  std::vector<std::uint8_t> seen(mask.size(), 0);
  std::vector<int> stack;
  std::size_t best = 0;
  for (int start = 0; start < w * h; ++start) {
    if (seen[start] || !mask.pixels()[start]) continue;
    std::size_t n = 0;
    stack.push_back(start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int idx = stack.back();
      stack.pop_back();
      ++n;
      const int x = idx % w;
      const int y = idx / w;
      const int nbrs[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& nb : nbrs) {
        if (!mask.contains(nb[0], nb[1])) continue;
        const int j = nb[1] * w + nb[0];
        if (!seen[j] && mask.pixels()[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    best = std::max(best, n);
  }
  return best;
}

namespace detail {

struct HoughGrid {
  int step;
  int nx, ny;    // centre cells, centre of cell i is i*step
  int i0, i1;    // admissible centre columns, inclusive
  int j0, j1;    // admissible centre rows, inclusive

  HoughGrid(int width, int height, int step_px, const CenterWindow& win)
      : step(step_px),
        nx((width + step_px - 1) / step_px),
        ny((height + step_px - 1) / step_px) {
    i0 = std::clamp((std::max(win.x0, 0) + step - 1) / step, 0, nx);
    j0 = std::clamp((std::max(win.y0, 0) + step - 1) / step, 0, ny);
    i1 = std::clamp(std::min(win.x1, width - 1) / step, -1, nx - 1);
    j1 = std::clamp(std::min(win.y1, height - 1) / step, -1, ny - 1);
  }

  bool empty() const { return i0 > i1 || j0 > j1; }
};

/// Integer offsets (dx, dy) with |hypot(dx, dy) - r| <= half, flattened with
/// the accumulator stride.
inline void ring_offsets(double r, double half, int stride,
                         std::vector<std::ptrdiff_t>& out) {
  out.clear();
  const double lo = std::max(0.0, r - half);
  const double hi = r + half;
  const double lo2 = lo * lo;
  const double hi2 = hi * hi;
  const int reach = static_cast<int>(std::floor(hi));
  for (int dy = -reach; dy <= reach; ++dy) {
    for (int dx = -reach; dx <= reach; ++dx) {
      const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
      if (d2 >= lo2 && d2 <= hi2) {
        out.push_back(static_cast<std::ptrdiff_t>(dy) * stride + dx);
      }
    }
  }
}

/// Ring voting on a grid whose cell spacing exceeds one pixel.
inline void vote_ring_generic(std::span<const EdgePoint> points, double r,
                              double half, int s, const HoughGrid& grid,
                              int stride, int pad,
                              std::vector<std::int32_t>& acc) {
  const double lo = std::max(0.0, r - half);
  const double hi = r + half;
  const double lo2 = lo * lo;
  const double hi2 = hi * hi;
  for (const auto& p : points) {
    const int ja = std::max(0, static_cast<int>(std::floor((p.y - hi) / s)));
    const int jb = std::min(grid.ny - 1, static_cast<int>(std::ceil((p.y + hi) / s)));
    for (int j = ja; j <= jb; ++j) {
      const double dy = static_cast<double>(j) * s - p.y;
      const double dy2 = dy * dy;
      if (dy2 > hi2) continue;
      const double outer = std::sqrt(hi2 - dy2);
      const int ia = std::max(0, static_cast<int>(std::floor((p.x - outer) / s)));
      const int ib = std::min(grid.nx - 1, static_cast<int>(std::ceil((p.x + outer) / s)));
      std::int32_t* row = acc.data() + (static_cast<std::size_t>(j) + pad) * stride + pad;
      for (int i = ia; i <= ib; ++i) {
        const double dx = static_cast<double>(i) * s - p.x;
        const double d2 = dx * dx + dy2;
        if (d2 >= lo2 && d2 <= hi2) ++row[i];
      }
    }
  }
}

inline int count_ring_votes(std::span<const EdgePoint> points, double cx,
                            double cy, double r, double half) {
  const double lo = std::max(0.0, r - half);
  const double hi = r + half;
  const double lo2 = lo * lo;
  const double hi2 = hi * hi;
  int votes = 0;
  for (const auto& p : points) {
    const double dx = p.x - cx;
    const double dy = p.y - cy;
    const double d2 = dx * dx + dy * dy;
    votes += (d2 >= lo2 && d2 <= hi2) ? 1 : 0;
  }
  return votes;
}

}  // namespace detail

/// Circular Hough transform. Every edge point votes for each (cx, cy, r) cell
/// whose circle passes within accumulator_step/2 of it. The strongest cell
/// admitted by `admit(cx, cy, r)` wins; ties go to the smallest (r, cy, cx).
/// The winner is refined to the vote-weighted centroid of its 3x3x3
/// neighbourhood.
template <class Admit>
HoughResult hough_circle(std::span<const EdgePoint> points, RadiusRange range,
                         const HoughConfig& cfg, int width, int height,
                         const CenterWindow& window, Admit&& admit) {
  require(!points.empty(), ErrorCode::empty_input,
          "Hough transform needs at least one edge point");
  require(range.min > 0 && range.min <= range.max, ErrorCode::invalid_argument,
          "invalid radius range [" + std::to_string(range.min) + ", " +
              std::to_string(range.max) + "]");
  require(width > 0 && height > 0, ErrorCode::invalid_argument,
          "Hough domain must be non-empty");
  require(cfg.accumulator_step >= 1 && cfg.radius_step >= 1,
          ErrorCode::invalid_argument, "Hough steps must be >= 1");

  const detail::HoughGrid grid(width, height, cfg.accumulator_step, window);
  require(!grid.empty(), ErrorCode::no_circle_found,
          "candidate centre window is empty");
  const double half = 0.5 * cfg.accumulator_step;
  const int s = grid.step;

  // The accumulator is padded so that every vote of a ring lands in memory;
  // only cells inside the grid window are ever read back.
  const int pad = static_cast<int>(std::ceil(range.max + half)) + 1;
  const int stride = grid.nx + 2 * pad;
  std::vector<std::int32_t> acc(static_cast<std::size_t>(stride) *
                                (grid.ny + 2 * pad));
  const auto cell = [&](int i, int j) {
    return (static_cast<std::size_t>(j) + pad) * stride + (i + pad);
  };
  std::vector<std::ptrdiff_t> ring;
  int best_votes = -1;
  int best_i = 0, best_j = 0, best_k = 0;

  const int n_radii = (range.max - range.min) / cfg.radius_step + 1;
  for (int k = 0; k < n_radii; ++k) {
    const double r = range.min + k * cfg.radius_step;
    std::fill(acc.begin(), acc.end(), 0);
    if (s == 1) {
      detail::ring_offsets(r, half, stride, ring);
      for (const auto& p : points) {
        std::int32_t* base = acc.data() + cell(p.x, p.y);
        for (const auto off : ring) ++base[off];
      }
    } else {
      detail::vote_ring_generic(points, r, half, s, grid, stride, pad, acc);
    }

    for (int j = grid.j0; j <= grid.j1; ++j) {
      const std::int32_t* row = acc.data() + cell(0, j);
      for (int i = grid.i0; i <= grid.i1; ++i) {
        if (row[i] > best_votes &&
            admit(static_cast<double>(i * s), static_cast<double>(j * s), r)) {
          best_votes = row[i];
          best_i = i;
          best_j = j;
          best_k = k;
        }
      }
    }
  }
  require(best_votes >= 0, ErrorCode::no_circle_found,
          "no admissible Hough cell");

  double wsum = 0.0, sx = 0.0, sy = 0.0, sr = 0.0;
  for (int dk = -1; dk <= 1; ++dk) {
    const int k = best_k + dk;
    if (k < 0 || k >= n_radii) continue;
    const double r = range.min + k * cfg.radius_step;
    for (int dj = -1; dj <= 1; ++dj) {
      const int j = best_j + dj;
      if (j < grid.j0 || j > grid.j1) continue;
      for (int di = -1; di <= 1; ++di) {
        const int i = best_i + di;
        if (i < grid.i0 || i > grid.i1) continue;
        const double cx = i * s;
        const double cy = j * s;
        const double v = detail::count_ring_votes(points, cx, cy, r, half);
        wsum += v;
        sx += v * cx;
        sy += v * cy;
        sr += v * r;
      }
    }
  }

  HoughResult result;
  const double peak_r = range.min + best_k * cfg.radius_step;
  if (wsum > 0.0) {
    result.circle = {sx / wsum, sy / wsum, sr / wsum};
  } else {
    result.circle = {static_cast<double>(best_i * s),
                     static_cast<double>(best_j * s), peak_r};
  }
  result.votes = best_votes;
  result.normalized_votes =
      best_votes / (2.0 * std::numbers::pi * peak_r);
  return result;
}

inline HoughResult hough_circle(std::span<const EdgePoint> points,
                                RadiusRange range, const HoughConfig& cfg,
                                int width, int height) {
  return hough_circle(points, range, cfg, width, height, CenterWindow{},
                      [](double, double, double) { return true; });
}

/// Outer circle from the whole boundary, then the pupil from the edge points
/// strictly inside it, centred near the iris centre and contained in it. A
/// mask without a usable pupil hole gets a concentric stand-in pupil and
/// `pupil_synthesized` set.
inline IrisBoundaries fit_boundaries(const BinaryMask& mask,
                                     const HoughConfig& cfg) {
  cfg.validate();
  require(largest_region(mask) >= 100, ErrorCode::mask_too_small,
          "mask has no connected iris region of at least 100 pixels");

  const auto edges = mask_boundary(mask);
  const auto outer = hough_circle(edges, {cfg.r_min_outer, cfg.r_max_outer},
                                  cfg, mask.width(), mask.height());
  require(outer.normalized_votes >= cfg.vote_floor, ErrorCode::no_circle_found,
          "no iris circle above the vote floor (best " +
              std::to_string(outer.normalized_votes) + ")");

  IrisBoundaries b;
  b.iris = outer.circle;
  const auto synthesize = [&] {
    b.pupil = {b.iris.cx, b.iris.cy, cfg.synthesized_pupil_ratio * b.iris.r};
    b.pupil_synthesized = true;
    return b;
  };

  const double R = b.iris.r;
  const double ocx = b.iris.cx;
  const double ocy = b.iris.cy;
  // Boundary pixels of the iris disk itself sit within about a pixel of R.
  const double interior = R - 2.0;
  std::vector<EdgePoint> inside;
  for (const auto& p : edges) {
    if (std::hypot(p.x - ocx, p.y - ocy) < interior) inside.push_back(p);
  }
  const int r_max = std::min(cfg.r_max_inner, static_cast<int>(std::floor(R)) - 1);
  if (inside.empty() || r_max < cfg.r_min_inner) return synthesize();

  const double reach = cfg.inner_center_fraction * R;
  const CenterWindow window{static_cast<int>(std::floor(ocx - reach)),
                            static_cast<int>(std::floor(ocy - reach)),
                            static_cast<int>(std::ceil(ocx + reach)),
                            static_cast<int>(std::ceil(ocy + reach))};
  const auto admit = [&](double cx, double cy, double r) {
    const double d = std::hypot(cx - ocx, cy - ocy);
    return d <= reach && d + r <= R;
  };
  HoughResult inner;
  try {
    inner = hough_circle(inside, {cfg.r_min_inner, r_max}, cfg, mask.width(),
                         mask.height(), window, admit);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::no_circle_found) return synthesize();
    throw;
  }
  if (inner.normalized_votes < cfg.vote_floor) return synthesize();

  b.pupil = inner.circle;
  // The sub-grid centroid may drift outside the containment region.
  const double d = std::hypot(b.pupil.cx - ocx, b.pupil.cy - ocy);
  if (d + b.pupil.r > R) b.pupil.r = R - d;
  if (b.pupil.r <= 0.0 || !is_valid(b)) return synthesize();
  return b;
}

inline IrisBoundaries fit_boundaries(const BinaryMask& mask) {
  return fit_boundaries(mask, HoughConfig::for_width(mask.width()));
}

}  // namespace irisforge
