#pragma once

// Synthetic eye images with exact ground truth. The iris texture is a sum of
// random-phase sinusoids defined directly in rubber-sheet coordinates
// (rho, theta), so a rotation of the eye is an exact angular shift of the
// normalized texture.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "irisforge/circlefit.hpp"
#include "irisforge/error.hpp"
#include "irisforge/image.hpp"
#include "irisforge/rng.hpp"

namespace irisforge {

struct SynthEyeSpec {
  std::uint64_t identity_seed = 1;
  std::uint64_t nuisance_seed = 1;
  int width = 320;
  int height = 240;
  Circle pupil{160.0, 120.0, 25.0};
  Circle iris{160.0, 120.0, 70.0};
  double occlusion_fraction = 0.0;
  double noise_sigma = 0.0;
  double rotation = 0.0;  // radians, counterclockwise
};

struct SynthEye {
  GrayImage image;
  BinaryMask mask;
  IrisBoundaries truth;
};

namespace synth_detail {

constexpr int kComponents = 16;
constexpr double kPupilLevel = 15.0;
constexpr double kScleraLevel = 215.0;
constexpr double kEyelidLevel = 165.0;
constexpr double kIrisMean = 115.0;

struct Component {
  double amplitude;
  double radial_cycles;
  int angular_cycles;
  double phase;
};

using Texture = std::array<Component, kComponents>;

inline Texture make_texture(std::uint64_t identity_seed) {
  Rng rng(mix_seed(identity_seed, 0x7e47u));
  Texture t{};
  for (auto& c : t) {
    c.amplitude = rng.uniform(6.0, 14.0);
    c.radial_cycles = rng.uniform(0.5, 3.0);
    c.angular_cycles = rng.uniform_int(8, 64) * (rng.bit() ? 1 : -1);
    c.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  return t;
}

inline double texture_value(const Texture& t, double rho, double theta) {
  double v = kIrisMean;
  for (const auto& c : t) {
    v += c.amplitude * std::cos(2.0 * std::numbers::pi * c.radial_cycles * rho +
                                c.angular_cycles * theta + c.phase);
  }
  return std::clamp(v, 35.0, 190.0);
}

}  // namespace synth_detail

/// Inverse of the rubber-sheet map: finds (rho, theta) such that the blend
/// (1-rho)*pupil(theta) + rho*iris(theta) lands on (x, y).
inline void rubber_sheet_coords(const IrisBoundaries& b, double x, double y,
                                double& rho, double& theta) {
  const double wx = x - b.pupil.cx;
  const double wy = y - b.pupil.cy;
  const double ddx = b.iris.cx - b.pupil.cx;
  const double ddy = b.iris.cy - b.pupil.cy;
  const double dr = b.iris.r - b.pupil.r;
  // |w - rho*D|^2 = (r_p + rho*dr)^2, a quadratic in rho.
  const double a = ddx * ddx + ddy * ddy - dr * dr;
  const double half_b = wx * ddx + wy * ddy + b.pupil.r * dr;
  const double c = wx * wx + wy * wy - b.pupil.r * b.pupil.r;
  if (std::abs(a) < 1e-12) {
    rho = c / (2.0 * half_b);
  } else {
    const double disc = std::max(0.0, half_b * half_b - a * c);
    rho = (half_b - std::sqrt(disc)) / a;
  }
  const double ux = wx - rho * ddx;
  const double uy = wy - rho * ddy;
  theta = std::atan2(-uy, ux);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
}

inline void validate(const SynthEyeSpec& spec) {
  require(spec.width > 0 && spec.height > 0, ErrorCode::invalid_argument,
          "synthetic frame must be non-empty");
  IrisBoundaries b{spec.pupil, spec.iris, false};
  require(is_valid(b), ErrorCode::invalid_argument,
          "synthetic pupil must lie inside the iris");
  const auto& c = spec.iris;
  require(c.cx - c.r >= 0.0 && c.cy - c.r >= 0.0 &&
              c.cx + c.r <= spec.width - 1 && c.cy + c.r <= spec.height - 1,
          ErrorCode::invalid_argument, "iris circle does not fit in the frame");
  require(spec.occlusion_fraction >= 0.0 && spec.occlusion_fraction < 1.0,
          ErrorCode::invalid_argument, "occlusion fraction must be in [0, 1)");
  require(spec.noise_sigma >= 0.0, ErrorCode::invalid_argument,
          "noise sigma must be non-negative");
}

inline SynthEye generate(const SynthEyeSpec& spec) {
  validate(spec);
  const int w = spec.width;
  const int h = spec.height;
  const IrisBoundaries truth{spec.pupil, spec.iris, false};

  const auto in_pupil = [&](int x, int y) {
    return std::hypot(x - spec.pupil.cx, y - spec.pupil.cy) <= spec.pupil.r;
  };
  const auto in_iris = [&](int x, int y) {
    return std::hypot(x - spec.iris.cx, y - spec.iris.cy) <= spec.iris.r;
  };

  // Eyelid: every row above lid_row is covered. The lid sits at the lowest
  // row that keeps the covered share of the annulus <= occlusion_fraction.
  std::vector<std::size_t> annulus_per_row(h, 0);
  std::size_t annulus_total = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (in_iris(x, y) && !in_pupil(x, y)) ++annulus_per_row[y];
    }
    annulus_total += annulus_per_row[y];
  }
  int lid_row = 0;
  if (spec.occlusion_fraction > 0.0) {
    const double budget = spec.occlusion_fraction * annulus_total;
    std::size_t covered = 0;
    while (lid_row < h && covered + annulus_per_row[lid_row] <= budget) {
      covered += annulus_per_row[lid_row];
      ++lid_row;
    }
  }

  const auto texture = synth_detail::make_texture(spec.identity_seed);
  Rng noise(mix_seed(spec.nuisance_seed, 0x9015eu));
  std::vector<std::uint8_t> pixels(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> bits(pixels.size(), 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t idx = static_cast<std::size_t>(y) * w + x;
      double v;
      if (y < lid_row) {
        v = synth_detail::kEyelidLevel;
      } else if (in_pupil(x, y)) {
        v = synth_detail::kPupilLevel;
      } else if (in_iris(x, y)) {
        double rho, theta;
        rubber_sheet_coords(truth, x, y, rho, theta);
        v = synth_detail::texture_value(texture, rho, theta - spec.rotation);
        bits[idx] = 1;
      } else {
        v = synth_detail::kScleraLevel;
      }
      if (spec.noise_sigma > 0.0) v += noise.normal(0.0, spec.noise_sigma);
      pixels[idx] = static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 255.0)));
    }
  }
  return {GrayImage(w, h, std::move(pixels)), BinaryMask(w, h, std::move(bits)),
          truth};
}

/// One sample of a synthetic dataset.
struct SynthSample {
  std::string stem;
  std::string identity;
  SynthEyeSpec spec;
};

struct DatasetOptions {
  int identities = 50;
  int samples_per_identity = 4;
  std::uint64_t seed = 2019;
  int width = 320;
  int height = 240;
  double noise_sigma = 8.0;
  double max_rotation = 5.0 * std::numbers::pi / 180.0;
  double max_occlusion = 0.3;
};

inline std::string identity_name(int id) {
  std::string s = std::to_string(id);
  return "id" + std::string(s.size() < 4 ? 4 - s.size() : 0, '0') + s;
}

/// Identity fixes the texture, iris geometry and pupil offset; each sample
/// re-draws position, pupil dilation, rotation, occlusion and noise.
inline std::vector<SynthSample> make_dataset_specs(const DatasetOptions& opt) {
  require(opt.identities > 0 && opt.samples_per_identity > 0,
          ErrorCode::invalid_argument, "dataset needs identities and samples");
  std::vector<SynthSample> out;
  const double w = opt.width;
  const double h = opt.height;
  for (int id = 0; id < opt.identities; ++id) {
    const std::uint64_t identity_seed = mix_seed(opt.seed, 2 * id + 1);
    Rng geo(mix_seed(identity_seed, 0x6e0u));
    const double iris_r = std::min(w, h) * geo.uniform(0.25, 0.31);
    const double base_cx = w / 2 + geo.uniform(-0.06, 0.06) * w;
    const double base_cy = h / 2 + geo.uniform(-0.04, 0.04) * h;
    const double pupil_ratio = geo.uniform(0.3, 0.5);
    const double off_x = geo.uniform(-0.04, 0.04) * iris_r;
    const double off_y = geo.uniform(-0.04, 0.04) * iris_r;

    for (int s = 0; s < opt.samples_per_identity; ++s) {
      const std::uint64_t nuisance_seed =
          mix_seed(identity_seed, 0x5a00u + static_cast<std::uint64_t>(s));
      Rng nui(nuisance_seed);
      SynthSample sample;
      sample.identity = identity_name(id);
      sample.stem = sample.identity + "_s" + std::to_string(s);
      auto& spec = sample.spec;
      spec.identity_seed = identity_seed;
      spec.nuisance_seed = nuisance_seed;
      spec.width = opt.width;
      spec.height = opt.height;
      const double margin = 2.0;
      const double cx = std::clamp(base_cx + nui.uniform(-6.0, 6.0),
                                   iris_r + margin, w - 1 - iris_r - margin);
      const double cy = std::clamp(base_cy + nui.uniform(-6.0, 6.0),
                                   iris_r + margin, h - 1 - iris_r - margin);
      spec.iris = {cx, cy, iris_r};
      spec.pupil = {cx + off_x, cy + off_y,
                    iris_r * pupil_ratio * nui.uniform(0.92, 1.08)};
      spec.rotation = nui.uniform(-opt.max_rotation, opt.max_rotation);
      spec.occlusion_fraction = nui.uniform(0.0, opt.max_occlusion);
      spec.noise_sigma = opt.noise_sigma;
      out.push_back(sample);
    }
  }
  return out;
}

}  // namespace irisforge
