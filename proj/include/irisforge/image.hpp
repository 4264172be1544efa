#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "irisforge/error.hpp"

namespace irisforge {

/// Row-major single-channel raster. Dimensions are fixed at construction and
/// the pixel buffer always holds exactly width*height values.
template <class T>
class Raster {
 public:
  using value_type = T;

  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  Raster(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    require(data_.size() == static_cast<std::size_t>(width) * height,
            ErrorCode::dimension_mismatch,
            "raster buffer holds " + std::to_string(data_.size()) +
                " values, expected " + std::to_string(width) + "x" +
                std::to_string(height));
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }

  T operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * width_ + x];
  }

  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const T> pixels() const noexcept { return data_; }

  bool same_shape(const Raster& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static void check_dims(int width, int height) {
    require(width > 0 && height > 0, ErrorCode::invalid_argument,
            "raster dimensions must be positive, got " + std::to_string(width) +
                "x" + std::to_string(height));
  }

  int width_;
  int height_;
  std::vector<T> data_;
};

/// 8-bit intensity image.
class GrayImage : public Raster<std::uint8_t> {
 public:
  using Raster::Raster;
};

/// Per-pixel iris labelling; stored as 0/1 bytes, true = iris.
class BinaryMask : public Raster<std::uint8_t> {
 public:
  BinaryMask(int width, int height, bool fill = false)
      : Raster(width, height, static_cast<std::uint8_t>(fill ? 1 : 0)) {}

  BinaryMask(int width, int height, std::vector<std::uint8_t> bits)
      : Raster(width, height, normalized(std::move(bits))) {}

  bool at(int x, int y) const noexcept { return (*this)(x, y) != 0; }

  std::size_t count() const noexcept {
    std::size_t n = 0;
    for (auto b : pixels()) n += b;
    return n;
  }

 private:
  static std::vector<std::uint8_t> normalized(std::vector<std::uint8_t> bits) {
    for (auto& b : bits) b = b ? 1 : 0;
    return bits;
  }
};

/// Nearest-neighbour resampling: output (x,y) reads source
/// (floor(x*w/W), floor(y*h/H)).
inline BinaryMask resize_mask_nn(const BinaryMask& mask, int new_width,
                                 int new_height) {
  require(new_width > 0 && new_height > 0, ErrorCode::invalid_argument,
          "resize target must be positive, got " + std::to_string(new_width) +
              "x" + std::to_string(new_height));
  std::vector<std::uint8_t> out(static_cast<std::size_t>(new_width) *
                                new_height);
  const auto w = static_cast<std::int64_t>(mask.width());
  const auto h = static_cast<std::int64_t>(mask.height());
  for (int y = 0; y < new_height; ++y) {
    const int sy = static_cast<int>(y * h / new_height);
    for (int x = 0; x < new_width; ++x) {
      const int sx = static_cast<int>(x * w / new_width);
      out[static_cast<std::size_t>(y) * new_width + x] = mask(sx, sy);
    }
  }
  return BinaryMask(new_width, new_height, std::move(out));
}

}  // namespace irisforge
