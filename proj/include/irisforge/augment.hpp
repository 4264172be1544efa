#pragma once

// Training-set augmentation: Gaussian blur at three radii plus two strengths
// of 3x3 edge enhancement. Edges are handled by clamping coordinates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "irisforge/error.hpp"
#include "irisforge/image.hpp"

namespace irisforge {

/// Sampled Gaussian with sigma = radius over +-ceil(2 sigma) taps, summing to 1.
inline std::vector<double> gaussian_taps(double radius) {
  require(radius > 0.0, ErrorCode::invalid_argument,
          "blur radius must be positive");
  const int half = static_cast<int>(std::ceil(2.0 * radius));
  std::vector<double> taps(2 * half + 1);
  double sum = 0.0;
  for (int i = -half; i <= half; ++i) {
    const double v = std::exp(-0.5 * i * i / (radius * radius));
    taps[i + half] = v;
    sum += v;
  }
  for (double& v : taps) v /= sum;
  return taps;
}

inline GrayImage gaussian_blur(const GrayImage& img, double radius) {
  const auto taps = gaussian_taps(radius);
  const int half = static_cast<int>(taps.size() / 2);
  const int w = img.width();
  const int h = img.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        acc += taps[k + half] * img(std::clamp(x + k, 0, w - 1), y);
      }
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  std::vector<std::uint8_t> out(tmp.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -half; k <= half; ++k) {
        acc += taps[k + half] *
               tmp[static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)) * w + x];
      }
      out[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::clamp(std::lround(acc), 0L, 255L));
    }
  }
  return GrayImage(w, h, std::move(out));
}

enum class EdgeVariant { standard, more };

struct EdgeKernel {
  int ring;
  int center;
  int divisor;
};

/// standard: ring -1, centre 10, divided by 2; more: ring -1, centre 9.
constexpr EdgeKernel edge_kernel(EdgeVariant v) {
  return v == EdgeVariant::standard ? EdgeKernel{-1, 10, 2} : EdgeKernel{-1, 9, 1};
}

inline GrayImage edge_enhance(const GrayImage& img, EdgeVariant variant) {
  const auto k = edge_kernel(variant);
  const int w = img.width();
  const int h = img.height();
  std::vector<std::uint8_t> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int sum = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int v = img(std::clamp(x + dx, 0, w - 1), std::clamp(y + dy, 0, h - 1));
          sum += (dx == 0 && dy == 0) ? k.center * v : k.ring * v;
        }
      }
      // Integer division rounding half away from zero.
      const int q = sum >= 0 ? (2 * sum + k.divisor) / (2 * k.divisor)
                             : -((-2 * sum + k.divisor) / (2 * k.divisor));
      out[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint8_t>(std::clamp(q, 0, 255));
    }
  }
  return GrayImage(w, h, std::move(out));
}

/// Blur r=2, 3, 4, then edge standard and edge more. Any mask paired with
/// the image applies unchanged to all five.
inline std::array<GrayImage, 5> augment_five_fold(const GrayImage& img) {
  return {gaussian_blur(img, 2.0), gaussian_blur(img, 3.0),
          gaussian_blur(img, 4.0), edge_enhance(img, EdgeVariant::standard),
          edge_enhance(img, EdgeVariant::more)};
}

/// File-name suffixes matching augment_five_fold order.
inline constexpr std::array<const char*, 5> kAugmentSuffixes = {
    "_blur2", "_blur3", "_blur4", "_edge1", "_edge2"};

}  // namespace irisforge
