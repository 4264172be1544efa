#pragma once

// PNG reading and writing on top of libpng. Only 8-bit grayscale and 8-bit
// RGB(A) input is accepted; RGB keeps the red channel.

#include <png.h>

#include <csetjmp>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "irisforge/error.hpp"
#include "irisforge/image.hpp"

namespace irisforge {

namespace detail {

struct DecodedPng {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> gray;
};

struct MemoryReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

inline void png_read_from_memory(png_structp png, png_bytep out,
                                 png_size_t length) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->offset + length > reader->size) {
    png_error(png, "truncated stream");
  }
  std::memcpy(out, reader->data + reader->offset, length);
  reader->offset += length;
}

inline void png_silent_warning(png_structp, png_const_charp) {}

enum class DecodeStatus { ok, unsupported, corrupt };

// Everything with a destructor lives in the caller; nothing non-trivial is
// constructed between setjmp and the last libpng call.
inline DecodeStatus decode_png_bytes(const std::vector<std::uint8_t>& bytes,
                                     DecodedPng& out) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    return DecodeStatus::corrupt;
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           nullptr, png_silent_warning);
  if (png == nullptr) return DecodeStatus::corrupt;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return DecodeStatus::corrupt;
  }
  MemoryReader reader{bytes.data(), bytes.size(), 0};
  volatile DecodeStatus status = DecodeStatus::ok;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> raw;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return DecodeStatus::corrupt;
  }
  png_set_read_fn(png, &reader, png_read_from_memory);
  png_read_info(png, info);

  const auto width = png_get_image_width(png, info);
  const auto height = png_get_image_height(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  int channels = 0;
  if (bit_depth == 8 && color_type == PNG_COLOR_TYPE_GRAY) {
    channels = 1;
  } else if (bit_depth == 8 && color_type == PNG_COLOR_TYPE_RGB) {
    channels = 3;
  } else if (bit_depth == 8 && color_type == PNG_COLOR_TYPE_RGB_ALPHA) {
    channels = 4;
  } else {
    status = DecodeStatus::unsupported;
  }
  if (status == DecodeStatus::ok) {
    if (png_get_interlace_type(png, info) != PNG_INTERLACE_NONE) {
      png_set_interlace_handling(png);
    }
    png_read_update_info(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    raw.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = raw.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.gray.resize(static_cast<std::size_t>(width) * height);
    for (png_uint_32 y = 0; y < height; ++y) {
      for (png_uint_32 x = 0; x < width; ++x) {
        out.gray[static_cast<std::size_t>(y) * width + x] =
            raw[y * stride + static_cast<std::size_t>(x) * channels];
      }
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return status;
}

inline DecodedPng read_png(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::file_not_found, "no such file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_failure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  DecodedPng decoded;
  switch (decode_png_bytes(bytes, decoded)) {
    case DecodeStatus::ok:
      break;
    case DecodeStatus::unsupported:
      throw Error(ErrorCode::unsupported_format,
                  path.string() + ": only 8-bit grayscale or RGB PNG is accepted");
    case DecodeStatus::corrupt:
      throw Error(ErrorCode::corrupt_stream,
                  path.string() + ": not a decodable PNG stream");
  }
  if (decoded.width <= 0 || decoded.height <= 0) {
    throw Error(ErrorCode::corrupt_stream, path.string() + ": empty image");
  }
  return decoded;
}

/// channels: 1 = gray, 3 = RGB; pixels are interleaved rows.
inline bool encode_png(const std::filesystem::path& path, int width,
                       int height, int channels, const std::uint8_t* pixels) {
  std::FILE* fp = std::fopen(path.string().c_str(), "wb");
  if (fp == nullptr) return false;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, png_silent_warning);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    return false;
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), 8,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, pixels + static_cast<std::size_t>(y) * width * channels);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return std::fclose(fp) == 0;
}

}  // namespace detail

inline GrayImage load_gray_image(const std::filesystem::path& path) {
  auto decoded = detail::read_png(path);
  return GrayImage(decoded.width, decoded.height, std::move(decoded.gray));
}

/// Pixels >= 128 are iris.
inline BinaryMask load_mask(const std::filesystem::path& path) {
  auto decoded = detail::read_png(path);
  for (auto& v : decoded.gray) v = v >= 128 ? 1 : 0;
  return BinaryMask(decoded.width, decoded.height, std::move(decoded.gray));
}

inline void save_gray_image(const GrayImage& image,
                            const std::filesystem::path& path) {
  if (!detail::encode_png(path, image.width(), image.height(), 1,
                          image.pixels().data())) {
    throw Error(ErrorCode::io_failure, "cannot write " + path.string());
  }
}

inline void save_mask(const BinaryMask& mask,
                      const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(mask.pixels().begin(), mask.pixels().end());
  for (auto& b : bytes) b = b ? 255 : 0;
  if (!detail::encode_png(path, mask.width(), mask.height(), 1,
                          bytes.data())) {
    throw Error(ErrorCode::io_failure, "cannot write " + path.string());
  }
}

}  // namespace irisforge
