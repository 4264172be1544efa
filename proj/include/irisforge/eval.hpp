#pragma once

// Genuine/impostor score analytics. Scores are distances: lower means a
// better match, and a comparison is accepted when its score is below the
// threshold.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "irisforge/error.hpp"
#include "irisforge/metrics.hpp"

namespace irisforge {

struct ScoreSet {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct RocPoint {
  double threshold = 0.0;
  double fmr = 0.0;
  double fnmr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // ascending threshold
  double eer = 0.0;
};

/// FMR = share of impostors with score < t, FNMR = share of genuine with
/// score >= t, swept over every distinct score plus one threshold above the
/// largest. The EER is interpolated linearly between the two sweep points
/// where FMR - FNMR changes sign.
inline RocCurve roc(const ScoreSet& scores) {
  require(!scores.genuine.empty() && !scores.impostor.empty(),
          ErrorCode::empty_input, "ROC needs genuine and impostor scores");
  auto gen = scores.genuine;
  auto imp = scores.impostor;
  std::sort(gen.begin(), gen.end());
  std::sort(imp.begin(), imp.end());
  std::vector<double> thresholds;
  thresholds.reserve(gen.size() + imp.size() + 1);
  std::merge(gen.begin(), gen.end(), imp.begin(), imp.end(),
             std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  thresholds.push_back(
      std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity()));

  RocCurve curve;
  curve.points.reserve(thresholds.size());
  const double ng = static_cast<double>(gen.size());
  const double ni = static_cast<double>(imp.size());
  std::size_t imp_below = 0, gen_below = 0;
  for (double t : thresholds) {
    while (imp_below < imp.size() && imp[imp_below] < t) ++imp_below;
    while (gen_below < gen.size() && gen[gen_below] < t) ++gen_below;
    curve.points.push_back({t, imp_below / ni, (gen.size() - gen_below) / ng});
  }

  // FMR - FNMR is non-decreasing along the sweep, from -1 to +1.
  const auto& p = curve.points;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double d = p[k].fmr - p[k].fnmr;
    if (d == 0.0) {
      curve.eer = p[k].fmr;
      return curve;
    }
    if (d > 0.0) {
      const double dprev = p[k - 1].fmr - p[k - 1].fnmr;
      const double alpha = -dprev / (d - dprev);
      curve.eer = (1.0 - alpha) * p[k - 1].fmr + alpha * p[k].fmr;
      return curve;
    }
  }
  curve.eer = p.back().fmr;
  return curve;
}

/// R-7 quantile (linear interpolation between order statistics) of sorted data.
inline double quantile_r7(std::span<const double> sorted, double prob) {
  require(!sorted.empty(), ErrorCode::empty_input, "quantile of empty data");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

struct ClassStats {
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std_dev = 0.0;
};

inline ClassStats class_stats(std::span<const double> values) {
  require(!values.empty(), ErrorCode::empty_input, "statistics of empty data");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto s = summarize(v);
  return {v.size(), v.front(), quantile_r7(v, 0.25), quantile_r7(v, 0.5),
          quantile_r7(v, 0.75), v.back(), s.mean, s.std_dev};
}

struct ScoreSummary {
  ClassStats genuine;
  ClassStats impostor;
};

inline ScoreSummary summarize_scores(const ScoreSet& scores) {
  return {class_stats(scores.genuine), class_stats(scores.impostor)};
}

}  // namespace irisforge
