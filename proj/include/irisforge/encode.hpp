#pragma once

// Gabor phase encoding of a normalized iris.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "irisforge/error.hpp"
#include "irisforge/iris_code.hpp"
#include "irisforge/normalize.hpp"

namespace irisforge {

/// Complex kernel with odd height (radial taps) and width (angular taps).
/// Each part is zero-mean with unit L2 norm.
struct GaborKernel {
  int height = 0;
  int width = 0;
  std::vector<double> real;
  std::vector<double> imag;

  double re(int dy, int dx) const { return real[static_cast<std::size_t>(dy) * width + dx]; }
  double im(int dy, int dx) const { return imag[static_cast<std::size_t>(dy) * width + dx]; }
};

/// Parametric kernel: Gaussian envelope times a complex carrier running along
/// the angular axis.
struct GaborSpec {
  double wavelength = 8.0;    // angular columns per carrier cycle
  double sigma_radial = 1.5;  // rows
  double sigma_angular = 3.0; // columns
  int height = 9;
  int width = 15;
};

struct BankEntry {
  GaborKernel kernel;
  int rows_step = 4;
  int cols_step = 4;
};

struct FilterBank {
  std::vector<BankEntry> entries;
  /// A bit is valid when at least this share of its kernel support is valid.
  double support_valid_fraction = 0.75;

  void validate() const {
    require(!entries.empty(), ErrorCode::invalid_argument,
            "filter bank needs at least one kernel");
    require(support_valid_fraction >= 0.0 && support_valid_fraction <= 1.0,
            ErrorCode::invalid_argument, "support_valid_fraction must be in [0, 1]");
    for (const auto& e : entries) {
      require(e.rows_step >= 1 && e.cols_step >= 1, ErrorCode::invalid_argument,
              "application steps must be >= 1");
      require(e.cols_step == entries.front().cols_step,
              ErrorCode::invalid_argument,
              "all kernels must share one angular application step");
    }
  }
};

namespace detail {

inline void zero_mean_unit_norm(std::vector<double>& part, const char* which) {
  double mean = 0.0;
  for (double v : part) mean += v;
  mean /= static_cast<double>(part.size());
  double norm = 0.0;
  for (double& v : part) {
    v -= mean;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  require(norm > 1e-12, ErrorCode::invalid_argument,
          std::string("kernel ") + which + " part vanishes after DC removal");
  for (double& v : part) v /= norm;
}

}  // namespace detail

/// Builds a kernel from explicit coefficients, removing DC and normalizing
/// each part.
inline GaborKernel make_kernel(int height, int width, std::vector<double> real,
                               std::vector<double> imag) {
  require(height > 0 && width > 0 && height % 2 == 1 && width % 2 == 1,
          ErrorCode::invalid_argument, "kernel dimensions must be odd");
  const auto n = static_cast<std::size_t>(height) * width;
  require(real.size() == n && imag.size() == n, ErrorCode::invalid_argument,
          "kernel coefficient count does not match its size");
  detail::zero_mean_unit_norm(real, "real");
  detail::zero_mean_unit_norm(imag, "imaginary");
  return {height, width, std::move(real), std::move(imag)};
}

inline GaborKernel make_gabor(const GaborSpec& spec) {
  require(spec.wavelength > 0 && spec.sigma_radial > 0 && spec.sigma_angular > 0,
          ErrorCode::invalid_argument, "Gabor parameters must be positive");
  const auto n = static_cast<std::size_t>(std::max(spec.height, 0)) *
                 static_cast<std::size_t>(std::max(spec.width, 0));
  std::vector<double> re(n), im(n);
  const int hy = spec.height / 2;
  const int hx = spec.width / 2;
  for (int y = 0; y < spec.height; ++y) {
    for (int x = 0; x < spec.width; ++x) {
      const double dy = y - hy;
      const double dx = x - hx;
      const double env =
          std::exp(-0.5 * (dy * dy / (spec.sigma_radial * spec.sigma_radial) +
                           dx * dx / (spec.sigma_angular * spec.sigma_angular)));
      const double phase = 2.0 * std::numbers::pi * dx / spec.wavelength;
      re[static_cast<std::size_t>(y) * spec.width + x] = env * std::cos(phase);
      im[static_cast<std::size_t>(y) * spec.width + x] = env * std::sin(phase);
    }
  }
  return make_kernel(spec.height, spec.width, std::move(re), std::move(im));
}

/// Three scales, one octave apart, 9 radial taps and 15/27/51 angular taps,
/// applied every 4 rows and every 4 columns.
inline FilterBank default_bank() {
  FilterBank bank;
  const GaborSpec specs[] = {
      {6.0, 1.5, 2.5, 9, 15},
      {12.0, 1.5, 4.5, 9, 27},
      {24.0, 1.5, 8.5, 9, 51},
  };
  for (const auto& s : specs) bank.entries.push_back({make_gabor(s), 4, 4});
  bank.support_valid_fraction = 0.75;
  return bank;
}

/// Radial rows at which a kernel is applied: rows_step/2, +rows_step, ...
inline std::vector<int> application_rows(int n_radial, int rows_step) {
  std::vector<int> rows;
  for (int i = rows_step / 2; i < n_radial; i += rows_step) rows.push_back(i);
  return rows;
}

struct ComplexResponse {
  double re = 0.0;
  double im = 0.0;
  /// Sums of |texture * coefficient|, the scale for round-off in re and im.
  double re_scale = 0.0;
  double im_scale = 0.0;
  double valid_fraction = 0.0;
};

/// Sign bit with ties to 1; responses within round-off of zero are ties.
inline bool phase_bit(double response, double scale) {
  return response >= -1e-10 * scale;
}

/// Correlation of the texture with the kernel centred at (row, col). The
/// angular axis wraps; rows past either edge clamp to the edge row.
inline ComplexResponse kernel_response(const NormalizedIris& n,
                                       const GaborKernel& k, int row, int col) {
  const int hy = k.height / 2;
  const int hx = k.width / 2;
  const int cols = n.n_angular();
  ComplexResponse out;
  int valid = 0;
  for (int dy = 0; dy < k.height; ++dy) {
    const int r = std::clamp(row + dy - hy, 0, n.n_radial() - 1);
    for (int dx = 0; dx < k.width; ++dx) {
      const int c = ((col + dx - hx) % cols + cols) % cols;
      const double t = n.texture(r, c);
      out.re += t * k.re(dy, dx);
      out.im += t * k.im(dy, dx);
      out.re_scale += std::abs(t * k.re(dy, dx));
      out.im_scale += std::abs(t * k.im(dy, dx));
      valid += n.valid(r, c) ? 1 : 0;
    }
  }
  out.valid_fraction = static_cast<double>(valid) / (k.height * k.width);
  return out;
}

/// Code layout: for each kernel in bank order, its real-part rows then its
/// imaginary-part rows; one column per angular application point.
inline IrisCode encode(const NormalizedIris& n, const FilterBank& bank) {
  bank.validate();
  const int cols_step = bank.entries.front().cols_step;
  require(n.n_angular() % cols_step == 0, ErrorCode::invalid_argument,
          "angular resolution must be a multiple of the application step");
  int total_rows = 0;
  for (const auto& e : bank.entries) {
    require(e.kernel.height <= n.n_radial(), ErrorCode::kernel_too_large,
            "kernel has " + std::to_string(e.kernel.height) +
                " radial taps but the normalized iris only " +
                std::to_string(n.n_radial()) + " rows");
    total_rows += 2 * static_cast<int>(application_rows(n.n_radial(), e.rows_step).size());
  }
  const int code_cols = n.n_angular() / cols_step;
  IrisCode code(total_rows, code_cols);

  int base = 0;
  for (const auto& e : bank.entries) {
    const auto rows = application_rows(n.n_radial(), e.rows_step);
    const int nr = static_cast<int>(rows.size());
    for (int m = 0; m < nr; ++m) {
      for (int c = 0; c < code_cols; ++c) {
        const auto resp = kernel_response(n, e.kernel, rows[m], c * cols_step);
        const bool ok = resp.valid_fraction >= bank.support_valid_fraction;
        code.set_bit(base + m, c, phase_bit(resp.re, resp.re_scale));
        code.set_bit(base + nr + m, c, phase_bit(resp.im, resp.im_scale));
        code.set_valid(base + m, c, ok);
        code.set_valid(base + nr + m, c, ok);
      }
    }
    base += 2 * nr;
  }
  return code;
}

}  // namespace irisforge
