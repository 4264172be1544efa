#pragma once

// Bit matrix of Gabor phase bits plus a validity matrix of the same shape.
//
// Rows are (kernel, real|imag, radial position); columns are angular
// positions. Storage is column-major with each column packed into 64-bit
// words, so a circular angular shift is a column index offset and comparisons
// run a word at a time.

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "irisforge/error.hpp"

namespace irisforge {

class IrisCode {
 public:
  IrisCode(int rows, int cols) : rows_(rows), cols_(cols) {
    require(rows > 0 && cols > 0, ErrorCode::invalid_argument,
            "iris code shape must be positive");
    words_per_col_ = (rows + 63) / 64;
    bits_.assign(static_cast<std::size_t>(words_per_col_) * cols, 0);
    valid_.assign(bits_.size(), 0);
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  /// Angular positions in the code.
  int n_angular_positions() const noexcept { return cols_; }
  int words_per_col() const noexcept { return words_per_col_; }
  std::size_t total_bits() const noexcept {
    return static_cast<std::size_t>(rows_) * cols_;
  }

  bool bit(int row, int col) const noexcept { return get(bits_, row, col); }
  bool valid(int row, int col) const noexcept { return get(valid_, row, col); }
  void set_bit(int row, int col, bool v) noexcept { put(bits_, row, col, v); }
  void set_valid(int row, int col, bool v) noexcept { put(valid_, row, col, v); }

  const std::uint64_t* bit_column(int col) const noexcept {
    return bits_.data() + static_cast<std::size_t>(col) * words_per_col_;
  }
  const std::uint64_t* valid_column(int col) const noexcept {
    return valid_.data() + static_cast<std::size_t>(col) * words_per_col_;
  }

  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (auto w : valid_) n += std::popcount(w);
    return n;
  }

  bool same_shape(const IrisCode& o) const noexcept {
    return rows_ == o.rows_ && cols_ == o.cols_;
  }

  friend bool operator==(const IrisCode&, const IrisCode&) = default;

 private:
  static constexpr std::uint64_t one = 1;

  bool get(const std::vector<std::uint64_t>& plane, int row, int col) const noexcept {
    const auto w = plane[static_cast<std::size_t>(col) * words_per_col_ + row / 64];
    return (w >> (row % 64)) & one;
  }
  void put(std::vector<std::uint64_t>& plane, int row, int col, bool v) noexcept {
    auto& w = plane[static_cast<std::size_t>(col) * words_per_col_ + row / 64];
    const auto m = one << (row % 64);
    w = v ? (w | m) : (w & ~m);
  }

  int rows_;
  int cols_;
  int words_per_col_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> valid_;
};

/// Binary container: "IRCD", version byte, rows and cols as little-endian
/// u32, then the bit plane and the validity plane, each packed row-major
/// LSB-first and padded to a whole byte.
inline constexpr std::uint8_t kIrisCodeVersion = 1;

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const IrisCode& code) {
  std::vector<std::uint8_t> out = {'I', 'R', 'C', 'D', kIrisCodeVersion};
  detail::put_u32(out, static_cast<std::uint32_t>(code.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(code.cols()));
  const std::size_t plane_bytes = (code.total_bits() + 7) / 8;
  for (int plane = 0; plane < 2; ++plane) {
    const std::size_t base = out.size();
    out.resize(base + plane_bytes, 0);
    std::size_t k = 0;
    for (int r = 0; r < code.rows(); ++r) {
      for (int c = 0; c < code.cols(); ++c, ++k) {
        const bool v = plane == 0 ? code.bit(r, c) : code.valid(r, c);
        if (v) out[base + k / 8] |= static_cast<std::uint8_t>(1u << (k % 8));
      }
    }
  }
  return out;
}

inline IrisCode deserialize_iris_code(const std::vector<std::uint8_t>& in) {
  require(in.size() >= 13 && in[0] == 'I' && in[1] == 'R' && in[2] == 'C' &&
              in[3] == 'D',
          ErrorCode::corrupt_stream, "missing IRCD header");
  require(in[4] == kIrisCodeVersion, ErrorCode::unsupported_format,
          "unsupported iris code version " + std::to_string(in[4]));
  const auto rows = detail::get_u32(in, 5);
  const auto cols = detail::get_u32(in, 9);
  require(rows > 0 && cols > 0 && rows < (1u << 20) && cols < (1u << 20),
          ErrorCode::corrupt_stream, "implausible iris code shape");
  IrisCode code(static_cast<int>(rows), static_cast<int>(cols));
  const std::size_t plane_bytes = (code.total_bits() + 7) / 8;
  require(in.size() == 13 + 2 * plane_bytes, ErrorCode::corrupt_stream,
          "iris code payload has the wrong length");
  for (int plane = 0; plane < 2; ++plane) {
    const std::size_t base = 13 + plane * plane_bytes;
    std::size_t k = 0;
    for (int r = 0; r < code.rows(); ++r) {
      for (int c = 0; c < code.cols(); ++c, ++k) {
        const bool v = (in[base + k / 8] >> (k % 8)) & 1u;
        if (plane == 0) code.set_bit(r, c, v);
        else code.set_valid(r, c, v);
      }
    }
  }
  return code;
}

inline void write_iris_code(const IrisCode& code,
                            const std::filesystem::path& path) {
  const auto bytes = serialize(code);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::io_failure,
          "cannot write " + path.string());
}

inline IrisCode read_iris_code(const std::filesystem::path& path) {
  std::error_code ec;
  require(std::filesystem::is_regular_file(path, ec), ErrorCode::file_not_found,
          "no such file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io_failure,
          "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize_iris_code(bytes);
}

}  // namespace irisforge
