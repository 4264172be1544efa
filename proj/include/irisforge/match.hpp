#pragma once

// Masked fractional Hamming distance with angular shift compensation.

#include <bit>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <string>

#include "irisforge/error.hpp"
#include "irisforge/iris_code.hpp"

namespace irisforge {

struct MatchOptions {
  int max_shift = 16;
  std::size_t min_bits = 128;
};

struct ShiftScore {
  double score = 0.0;
  std::size_t bits_compared = 0;
};

struct MatchResult {
  double score = 0.0;
  int best_shift = 0;
  std::size_t bits_compared = 0;
};

namespace detail {

struct ShiftCounts {
  std::size_t disagree = 0;
  std::size_t common = 0;
};

/// b is read shifted: column c of the shifted code is column c - shift of b.
inline ShiftCounts count_at_shift(const IrisCode& a, const IrisCode& b,
                                  int shift) {
  const int cols = a.cols();
  const int wpc = a.words_per_col();
  const int s = ((shift % cols) + cols) % cols;
  ShiftCounts out;
  for (int c = 0; c < cols; ++c) {
    int cb = c - s;
    if (cb < 0) cb += cols;
    const std::uint64_t* ab = a.bit_column(c);
    const std::uint64_t* av = a.valid_column(c);
    const std::uint64_t* bb = b.bit_column(cb);
    const std::uint64_t* bv = b.valid_column(cb);
    for (int w = 0; w < wpc; ++w) {
      const std::uint64_t common = av[w] & bv[w];
      out.common += std::popcount(common);
      out.disagree += std::popcount((ab[w] ^ bb[w]) & common);
    }
  }
  return out;
}

inline void check_shapes(const IrisCode& a, const IrisCode& b) {
  require(a.same_shape(b), ErrorCode::shape_mismatch,
          "iris code shapes differ: " + std::to_string(a.rows()) + "x" +
              std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
              "x" + std::to_string(b.cols()));
}

}  // namespace detail

/// Fraction of disagreeing bits among those valid in both codes, with b
/// circularly shifted by `shift` angular positions.
inline ShiftScore hd_at_shift(const IrisCode& a, const IrisCode& b, int shift) {
  detail::check_shapes(a, b);
  const auto counts = detail::count_at_shift(a, b, shift);
  require(counts.common > 0, ErrorCode::insufficient_overlap,
          "codes share no valid bits at shift " + std::to_string(shift));
  return {static_cast<double>(counts.disagree) / static_cast<double>(counts.common),
          counts.common};
}

/// Best score over shifts in [-max_shift, max_shift] that compare at least
/// min_bits bits. Ties prefer the smaller |shift|, then the negative shift.
inline MatchResult match(const IrisCode& a, const IrisCode& b,
                         const MatchOptions& opt = {}) {
  detail::check_shapes(a, b);
  require(opt.max_shift >= 0, ErrorCode::invalid_argument,
          "max_shift must be non-negative");
  bool found = false;
  MatchResult best;
  // Visiting 0, -1, +1, -2, +2, ... and keeping only strict improvements
  // applies the tie-break order directly.
  for (int k = 0; k <= 2 * opt.max_shift; ++k) {
    const int shift = (k % 2 == 1) ? -(k + 1) / 2 : k / 2;
    const auto counts = detail::count_at_shift(a, b, shift);
    if (counts.common < opt.min_bits || counts.common == 0) continue;
    const double score =
        static_cast<double>(counts.disagree) / static_cast<double>(counts.common);
    if (!found || score < best.score) {
      best = {score, shift, counts.common};
      found = true;
    }
  }
  require(found, ErrorCode::insufficient_overlap,
          "no shift compares at least " + std::to_string(opt.min_bits) + " bits");
  return best;
}

}  // namespace irisforge
