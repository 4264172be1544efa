#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "irisforge/circlefit.hpp"
#include "irisforge/image.hpp"
#include "irisforge/iris_code.hpp"

namespace testing_support {

using irisforge::BinaryMask;
using irisforge::Circle;
using irisforge::GrayImage;

inline bool inside(const Circle& c, int x, int y) {
  const double dx = x - c.cx, dy = y - c.cy;
  return dx * dx + dy * dy <= c.r * c.r;
}

inline BinaryMask disk_mask(int w, int h, const Circle& c) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) bits[y * w + x] = inside(c, x, y);
  return BinaryMask(w, h, std::move(bits));
}

/// Iris disk minus pupil disk, with every row above `lid_row` removed.
inline BinaryMask annulus_mask(int w, int h, const Circle& pupil, const Circle& iris,
                               int lid_row = -1) {
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      bits[y * w + x] = y > lid_row && inside(iris, x, y) && !inside(pupil, x, y);
  return BinaryMask(w, h, std::move(bits));
}

inline BinaryMask random_mask(std::mt19937_64& rng, int w, int h, double p = 0.5) {
  std::bernoulli_distribution bit(p);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(w) * h);
  for (auto& b : bits) b = bit(rng);
  return BinaryMask(w, h, std::move(bits));
}

inline GrayImage random_image(std::mt19937_64& rng, int w, int h) {
  std::uniform_int_distribution<int> v(0, 255);
  std::vector<std::uint8_t> px(static_cast<std::size_t>(w) * h);
  for (auto& p : px) p = static_cast<std::uint8_t>(v(rng));
  return GrayImage(w, h, std::move(px));
}

/// Uniform random bits; each cell valid with probability p_valid.
inline irisforge::IrisCode random_code(std::mt19937_64& rng, int rows, int cols,
                                       double p_valid = 1.0) {
  std::bernoulli_distribution valid(p_valid);
  irisforge::IrisCode code(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      code.set_bit(r, c, rng() & 1);
      code.set_valid(r, c, valid(rng));
    }
  return code;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("irisforge_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support

// Expects `stmt` to throw irisforge::Error carrying `code`.
#define EXPECT_ERROR_CODE(stmt, expected_code)                                  \
  do {                                                                          \
    try {                                                                       \
      stmt;                                                                     \
      ADD_FAILURE() << #stmt " did not throw";                                  \
    } catch (const irisforge::Error& e_) {                                      \
      EXPECT_EQ(e_.code(), expected_code) << e_.what();                         \
    }                                                                           \
  } while (0)
