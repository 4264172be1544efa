#pragma once

// Agreement between a predicted and a ground-truth mask.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>

#include "irisforge/error.hpp"
#include "irisforge/image.hpp"

namespace irisforge {

struct SegScore {
  double iou = 1.0;
  double hd = 0.0;
};

struct MetricSummary {
  double mean = 0.0;
  double std_dev = 0.0;  // population sigma
  std::size_t n = 0;
};

namespace detail {

inline void check_same_shape(const BinaryMask& a, const BinaryMask& b) {
  require(a.same_shape(b), ErrorCode::dimension_mismatch,
          "mask sizes differ: " + std::to_string(a.width()) + "x" +
              std::to_string(a.height()) + " vs " + std::to_string(b.width()) +
              "x" + std::to_string(b.height()));
}

}  // namespace detail

/// |pred & gt| / |pred | gt|. An empty union counts as perfect agreement.
inline double iou(const BinaryMask& pred, const BinaryMask& gt) {
  detail::check_same_shape(pred, gt);
  const auto p = pred.pixels();
  const auto g = gt.pixels();
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    inter += p[i] & g[i];
    uni += p[i] | g[i];
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Fraction of pixels on which the two masks disagree.
inline double mask_hd(const BinaryMask& pred, const BinaryMask& gt) {
  detail::check_same_shape(pred, gt);
  const auto p = pred.pixels();
  const auto g = gt.pixels();
  std::size_t diff = 0;
  for (std::size_t i = 0; i < p.size(); ++i) diff += p[i] ^ g[i];
  return static_cast<double>(diff) / static_cast<double>(p.size());
}

inline SegScore score_segmentation(const BinaryMask& pred,
                                   const BinaryMask& gt) {
  return {iou(pred, gt), mask_hd(pred, gt)};
}

inline MetricSummary summarize(std::span<const double> scores) {
  require(!scores.empty(), ErrorCode::empty_input,
          "cannot summarize an empty score list");
  double sum = 0.0;
  for (double s : scores) sum += s;
  const double mean = sum / static_cast<double>(scores.size());
  double sq = 0.0;
  for (double s : scores) sq += (s - mean) * (s - mean);
  return {mean, std::sqrt(sq / static_cast<double>(scores.size())),
          scores.size()};
}

}  // namespace irisforge
