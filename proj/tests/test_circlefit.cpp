#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "irisforge/circlefit.hpp"
#include "support.hpp"

using namespace irisforge;
using testing_support::annulus_mask;
using testing_support::disk_mask;

namespace {

// Peak of a naive accumulator: every cell on the step grid counts the points
// within step/2 of its circle; ties keep the first cell in (r, cy, cx) order.
struct NaivePeak {
  int votes = -1;
  int cx = 0, cy = 0, r = 0;
};

NaivePeak naive_peak(const std::vector<EdgePoint>& pts, int w, int h, int rmin, int rmax,
                     int step) {
  NaivePeak best;
  const double half = 0.5 * step;
  for (int r = rmin; r <= rmax; ++r) {
    for (int cy = 0; cy < h; cy += step) {
      for (int cx = 0; cx < w; cx += step) {
        int v = 0;
        for (const auto& p : pts) {
          const double d = std::sqrt(double(p.x - cx) * (p.x - cx) + double(p.y - cy) * (p.y - cy));
          if (d >= r - half - 1e-12 && d <= r + half + 1e-12) ++v;
        }
        if (v > best.votes) best = {v, cx, cy, r};
      }
    }
  }
  return best;
}

std::vector<EdgePoint> circle_points(double cx, double cy, double r) {
  return mask_boundary(disk_mask(static_cast<int>(2 * (cx + r)) + 4,
                                 static_cast<int>(2 * (cy + r)) + 4, {cx, cy, r}));
}

}  // namespace

TEST(MaskBoundary, SolidBlockPerimeter) {
  BinaryMask m(9, 9);
  std::vector<std::uint8_t> bits(81, 0);
  for (int y = 2; y < 7; ++y)
    for (int x = 2; x < 7; ++x) bits[y * 9 + x] = 1;
  const auto edges = mask_boundary(BinaryMask(9, 9, bits));
  EXPECT_EQ(edges.size(), 16u);
  for (const auto& p : edges) {
    EXPECT_TRUE(p.x == 2 || p.x == 6 || p.y == 2 || p.y == 6);
  }
}

TEST(MaskBoundary, DegenerateMasks) {
  EXPECT_TRUE(mask_boundary(BinaryMask(5, 5)).empty());
  std::vector<std::uint8_t> one(25, 0);
  one[12] = 1;
  const auto e = mask_boundary(BinaryMask(5, 5, one));
  ASSERT_EQ(e.size(), 1u);
  EXPECT_EQ(e[0], (EdgePoint{2, 2}));
}

TEST(LargestRegion, CountsFourConnected) {
  // Two diagonal pixels are separate regions.
  EXPECT_EQ(largest_region(BinaryMask(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1})), 1u);
  EXPECT_EQ(largest_region(BinaryMask(4, 3, true)), 12u);
}

TEST(Hough, RenderedCircleWithinOnePixel) {
  const auto pts = circle_points(100, 100, 50);
  HoughConfig cfg;
  const auto res = hough_circle(pts, {30, 70}, cfg, 210, 210);
  EXPECT_NEAR(res.circle.cx, 100, 1.0);
  EXPECT_NEAR(res.circle.cy, 100, 1.0);
  EXPECT_NEAR(res.circle.r, 50, 1.0);
  EXPECT_GT(res.normalized_votes, 2 * cfg.vote_floor);
}

TEST(Hough, ConcentricPicksCircleInRange) {
  auto pts = circle_points(120, 120, 80);
  const auto small = circle_points(120, 120, 30);
  pts.insert(pts.end(), small.begin(), small.end());
  const auto res = hough_circle(pts, {60, 100}, HoughConfig{}, 250, 250);
  EXPECT_NEAR(res.circle.r, 80, 1.0);
  EXPECT_NEAR(res.circle.cx, 120, 1.0);
}

TEST(Hough, ThreePointCircumcircle) {
  // 15-20-25 triangle offsets put all three on the circle (50, 50, 25).
  const std::vector<EdgePoint> pts{{75, 50}, {50, 25}, {35, 70}};
  const auto res = hough_circle(pts, {10, 40}, HoughConfig{}, 100, 100);
  EXPECT_EQ(res.votes, 3);
  EXPECT_NEAR(res.circle.cx, 50, 1.0);
  EXPECT_NEAR(res.circle.cy, 50, 1.0);
  EXPECT_NEAR(res.circle.r, 25, 1.0);
}

TEST(Hough, PeakMatchesNaiveAccumulator) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 6; ++trial) {
    std::vector<EdgePoint> pts;
    for (int i = 0; i < 40; ++i) {
      pts.push_back({static_cast<int>(rng() % 48), static_cast<int>(rng() % 40)});
    }
    for (int step : {1, 2, 3}) {
      HoughConfig cfg;
      cfg.accumulator_step = step;
      const auto res = hough_circle(pts, {4, 14}, cfg, 48, 40);
      const auto oracle = naive_peak(pts, 48, 40, 4, 14, step);
      EXPECT_EQ(res.votes, oracle.votes) << "trial " << trial << " step " << step;
    }
  }
}

TEST(Hough, TieBreakSmallestRadiusThenRowThenColumn) {
  // A single point: every ring through it ties; the first cell in order wins.
  const std::vector<EdgePoint> pts{{10, 10}};
  const auto oracle = naive_peak(pts, 30, 30, 5, 8, 1);
  EXPECT_EQ(oracle.r, 5);
  HoughConfig cfg;
  const auto a = hough_circle(pts, {5, 8}, cfg, 30, 30);
  const auto b = hough_circle(pts, {5, 8}, cfg, 30, 30);
  EXPECT_EQ(a.votes, 1);
  EXPECT_EQ(a.circle, b.circle);
}

TEST(Hough, ErrorsOnBadInput) {
  HoughConfig cfg;
  EXPECT_ERROR_CODE((hough_circle({}, {5, 8}, cfg, 30, 30)), ErrorCode::empty_input);
  const std::vector<EdgePoint> pts{{1, 1}};
  EXPECT_ERROR_CODE((hough_circle(pts, {9, 8}, cfg, 30, 30)), ErrorCode::invalid_argument);
}

TEST(FitBoundaries, ConcentricAnnulus) {
  const auto mask = annulus_mask(320, 240, {160, 120, 30}, {160, 120, 80});
  const auto b = fit_boundaries(mask);
  EXPECT_FALSE(b.pupil_synthesized);
  EXPECT_GE(b.pupil.r, 29);
  EXPECT_LE(b.pupil.r, 31);
  EXPECT_GE(b.iris.r, 79);
  EXPECT_LE(b.iris.r, 81);
  EXPECT_NEAR(b.iris.cx, 160, 1.0);
  EXPECT_NEAR(b.pupil.cy, 120, 1.0);
}

TEST(FitBoundaries, TopThirtyPercentOccluded) {
  const Circle pupil{160, 120, 30}, iris{160, 120, 80};
  const int lid = static_cast<int>(std::lround(iris.cy - iris.r + 0.3 * 2 * iris.r));
  const auto b = fit_boundaries(annulus_mask(320, 240, pupil, iris, lid));
  EXPECT_NEAR(b.iris.cx, iris.cx, 2.0);
  EXPECT_NEAR(b.iris.cy, iris.cy, 2.0);
  EXPECT_NEAR(b.iris.r, iris.r, 2.0);
  EXPECT_NEAR(b.pupil.cx, pupil.cx, 2.0);
  EXPECT_NEAR(b.pupil.cy, pupil.cy, 2.0);
  EXPECT_NEAR(b.pupil.r, pupil.r, 2.0);
}

TEST(FitBoundaries, SolidDiskGetsSynthesizedPupil) {
  const auto b = fit_boundaries(disk_mask(320, 240, {150, 110, 70}));
  EXPECT_TRUE(b.pupil_synthesized);
  EXPECT_DOUBLE_EQ(b.pupil.r, 0.2 * b.iris.r);
  EXPECT_EQ(b.pupil.cx, b.iris.cx);
  EXPECT_EQ(b.pupil.cy, b.iris.cy);
  EXPECT_NEAR(b.iris.r, 70, 1.0);
}

TEST(FitBoundaries, TinyMaskRejected) {
  EXPECT_ERROR_CODE((fit_boundaries(disk_mask(100, 100, {50, 50, 4}))), ErrorCode::mask_too_small);
  EXPECT_ERROR_CODE(fit_boundaries(BinaryMask(100, 100)), ErrorCode::mask_too_small);
}

TEST(FitBoundaries, TranslationEquivariance) {
  const Circle pupil{150, 115, 26}, iris{152, 118, 72};
  const auto base = fit_boundaries(annulus_mask(320, 240, pupil, iris));
  for (auto [dx, dy] : {std::pair{7, -4}, std::pair{-11, 9}, std::pair{3, 13}}) {
    const auto moved = fit_boundaries(annulus_mask(
        320, 240, {pupil.cx + dx, pupil.cy + dy, pupil.r}, {iris.cx + dx, iris.cy + dy, iris.r}));
    EXPECT_NEAR(moved.iris.cx - base.iris.cx, dx, 1.0);
    EXPECT_NEAR(moved.iris.cy - base.iris.cy, dy, 1.0);
    EXPECT_NEAR(moved.pupil.cx - base.pupil.cx, dx, 1.0);
    EXPECT_NEAR(moved.pupil.cy - base.pupil.cy, dy, 1.0);
  }
}

TEST(FitBoundaries, AlwaysContainedAndDeterministic) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 12; ++trial) {
    const double R = 50 + 30 * u(rng);
    const Circle iris{160 + 20 * (u(rng) - 0.5), 120 + 20 * (u(rng) - 0.5), R};
    // Pupils that graze or cross the iris edge still yield a contained pair.
    const double pr = R * (0.3 + 0.5 * u(rng));
    const Circle pupil{iris.cx + 0.3 * R * (u(rng) - 0.5), iris.cy + 0.3 * R * (u(rng) - 0.5), pr};
    const auto mask = annulus_mask(320, 240, pupil, iris, static_cast<int>(iris.cy - R * u(rng)));
    if (largest_region(mask) < 100) continue;
    const auto b = fit_boundaries(mask);
    EXPECT_TRUE(is_valid(b)) << "trial " << trial;
    EXPECT_EQ(b, fit_boundaries(mask));
  }
}

TEST(HoughConfig, DefaultsFollowWidth) {
  const auto c = HoughConfig::for_width(640);
  EXPECT_EQ(c.r_min_outer, 80);
  EXPECT_EQ(c.r_max_outer, 320);
  EXPECT_EQ(c.r_min_inner, 16);
  EXPECT_EQ(c.r_max_inner, 160);
  EXPECT_EQ(c.accumulator_step, 1);
  EXPECT_EQ(c.radius_step, 1);
  EXPECT_DOUBLE_EQ(c.vote_floor, 0.2);
}
