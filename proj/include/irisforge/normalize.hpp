#pragma once

// Rubber-sheet unwrapping of the iris annulus onto a radial x angular grid.
//
// Conventions: column j is the angle theta = 2*pi*j/n_angular measured from
// the +x image axis, counterclockwise as seen on screen (y grows downwards,
// so a point at angle theta on a circle is (cx + r cos theta, cy - r sin theta)).
// Row i samples rho = (i + 0.5)/n_radial between the pupil (rho = 0) and the
// limbus (rho = 1).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "irisforge/circlefit.hpp"
#include "irisforge/error.hpp"
#include "irisforge/image.hpp"

namespace irisforge {

class NormalizedIris {
 public:
  NormalizedIris(int n_radial, int n_angular)
      : n_radial_(n_radial), n_angular_(n_angular) {
    require(n_radial > 0 && n_angular > 0, ErrorCode::invalid_argument,
            "normalized size must be positive");
    texture_.assign(static_cast<std::size_t>(n_radial) * n_angular, 0.0);
    valid_.assign(texture_.size(), 0);
  }

  int n_radial() const noexcept { return n_radial_; }
  int n_angular() const noexcept { return n_angular_; }

  double texture(int row, int col) const noexcept { return texture_[index(row, col)]; }
  bool valid(int row, int col) const noexcept { return valid_[index(row, col)] != 0; }

  void set(int row, int col, double value, bool is_valid) {
    texture_[index(row, col)] = std::clamp(value, 0.0, 255.0);
    valid_[index(row, col)] = is_valid ? 1 : 0;
  }

  void set_valid(int row, int col, bool is_valid) {
    valid_[index(row, col)] = is_valid ? 1 : 0;
  }

  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (auto v : valid_) n += v;
    return n;
  }

  friend bool operator==(const NormalizedIris&, const NormalizedIris&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * n_angular_ + col;
  }

  int n_radial_;
  int n_angular_;
  std::vector<double> texture_;
  std::vector<std::uint8_t> valid_;
};

/// Point at angle theta on a circle, in image coordinates.
inline void point_on_circle(const Circle& c, double theta, double& x,
                            double& y) {
  x = c.cx + c.r * std::cos(theta);
  y = c.cy - c.r * std::sin(theta);
}

/// Bilinear interpolation at pixel-centre coordinates with edge clamping.
inline double sample_bilinear(const GrayImage& image, double x, double y) {
  const double xc = std::clamp(x, 0.0, static_cast<double>(image.width() - 1));
  const double yc = std::clamp(y, 0.0, static_cast<double>(image.height() - 1));
  const int x0 = static_cast<int>(std::floor(xc));
  const int y0 = static_cast<int>(std::floor(yc));
  const int x1 = std::min(x0 + 1, image.width() - 1);
  const int y1 = std::min(y0 + 1, image.height() - 1);
  const double fx = xc - x0;
  const double fy = yc - y0;
  const double top = (1.0 - fx) * image(x0, y0) + fx * image(x1, y0);
  const double bottom = (1.0 - fx) * image(x0, y1) + fx * image(x1, y1);
  return (1.0 - fy) * top + fy * bottom;
}

inline NormalizedIris rubber_sheet(const GrayImage& image,
                                   const BinaryMask& mask,
                                   const IrisBoundaries& bounds,
                                   int n_radial = 64, int n_angular = 512) {
  require(image.same_shape(mask), ErrorCode::dimension_mismatch,
          "image and mask sizes differ");
  validate(bounds);
  require(n_radial > 0 && n_angular > 0, ErrorCode::invalid_argument,
          "normalized size must be positive");

  NormalizedIris out(n_radial, n_angular);
  for (int j = 0; j < n_angular; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / n_angular;
    double px, py, ix, iy;
    point_on_circle(bounds.pupil, theta, px, py);
    point_on_circle(bounds.iris, theta, ix, iy);
    for (int i = 0; i < n_radial; ++i) {
      const double rho = (i + 0.5) / n_radial;
      const double x = (1.0 - rho) * px + rho * ix;
      const double y = (1.0 - rho) * py + rho * iy;
      const int nx = static_cast<int>(std::lround(x));
      const int ny = static_cast<int>(std::lround(y));
      const bool ok = mask.contains(nx, ny) && mask.at(nx, ny);
      out.set(i, j, sample_bilinear(image, x, y), ok);
    }
  }
  return out;
}

/// Circular shift along the angular axis: out column j = in column j - shift.
/// A positive shift matches a counterclockwise rotation of the source.
inline NormalizedIris rotate_normalized(const NormalizedIris& n, int shift) {
  NormalizedIris out(n.n_radial(), n.n_angular());
  const int cols = n.n_angular();
  const int s = ((shift % cols) + cols) % cols;
  for (int i = 0; i < n.n_radial(); ++i) {
    for (int j = 0; j < cols; ++j) {
      const int src = (j - s + cols) % cols;
      out.set(i, j, n.texture(i, src), n.valid(i, src));
    }
  }
  return out;
}

/// Texture quantized to 8 bits (rows = radial, columns = angular).
inline GrayImage texture_image(const NormalizedIris& n) {
  std::vector<std::uint8_t> px(static_cast<std::size_t>(n.n_radial()) *
                               n.n_angular());
  for (int i = 0; i < n.n_radial(); ++i) {
    for (int j = 0; j < n.n_angular(); ++j) {
      px[static_cast<std::size_t>(i) * n.n_angular() + j] =
          static_cast<std::uint8_t>(std::lround(n.texture(i, j)));
    }
  }
  return GrayImage(n.n_angular(), n.n_radial(), std::move(px));
}

inline BinaryMask valid_mask(const NormalizedIris& n) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(n.n_radial()) *
                                 n.n_angular());
  for (int i = 0; i < n.n_radial(); ++i) {
    for (int j = 0; j < n.n_angular(); ++j) {
      bits[static_cast<std::size_t>(i) * n.n_angular() + j] = n.valid(i, j);
    }
  }
  return BinaryMask(n.n_angular(), n.n_radial(), std::move(bits));
}

}  // namespace irisforge
