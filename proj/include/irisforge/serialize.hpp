#pragma once

// JSON forms of boundaries, Hough settings, filter banks, synthetic specs and
// the run configuration.

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "irisforge/circlefit.hpp"
#include "irisforge/encode.hpp"
#include "irisforge/error.hpp"
#include "irisforge/match.hpp"
#include "irisforge/synth.hpp"

namespace irisforge {

using nlohmann::json;

inline json read_json_file(const std::filesystem::path& path) {
  std::error_code ec;
  require(std::filesystem::is_regular_file(path, ec), ErrorCode::file_not_found,
          "no such file: " + path.string());
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::io_failure, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, path.string() + ": " + e.what());
  }
}

inline void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << '\n';
  require(static_cast<bool>(out), ErrorCode::io_failure, "cannot write " + path.string());
}

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T get_required(const json& j, const char* key) {
  require(j.is_object() && j.contains(key), ErrorCode::parse_error,
          std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}

}  // namespace detail

inline json to_json(const Circle& c) { return {{"cx", c.cx}, {"cy", c.cy}, {"r", c.r}}; }

inline Circle circle_from_json(const json& j) {
  return {detail::get_required<double>(j, "cx"), detail::get_required<double>(j, "cy"),
          detail::get_required<double>(j, "r")};
}

inline json to_json(const IrisBoundaries& b) {
  return {{"pupil", to_json(b.pupil)},
          {"iris", to_json(b.iris)},
          {"pupil_synthesized", b.pupil_synthesized}};
}

inline IrisBoundaries boundaries_from_json(const json& j) {
  require(j.is_object() && j.contains("pupil") && j.contains("iris"),
          ErrorCode::parse_error, "boundaries need 'pupil' and 'iris'");
  IrisBoundaries b{circle_from_json(j.at("pupil")), circle_from_json(j.at("iris")),
                   detail::get_or<bool>(j, "pupil_synthesized", false)};
  validate(b);
  return b;
}

inline json to_json(const HoughConfig& c) {
  return {{"r_min_outer", c.r_min_outer},
          {"r_max_outer", c.r_max_outer},
          {"r_min_inner", c.r_min_inner},
          {"r_max_inner", c.r_max_inner},
          {"accumulator_step", c.accumulator_step},
          {"radius_step", c.radius_step},
          {"vote_floor", c.vote_floor},
          {"inner_center_fraction", c.inner_center_fraction},
          {"synthesized_pupil_ratio", c.synthesized_pupil_ratio}};
}

/// Fields present in `j` override `base`.
inline HoughConfig hough_config_from_json(const json& j, HoughConfig base) {
  using detail::get_or;
  base.r_min_outer = get_or(j, "r_min_outer", base.r_min_outer);
  base.r_max_outer = get_or(j, "r_max_outer", base.r_max_outer);
  base.r_min_inner = get_or(j, "r_min_inner", base.r_min_inner);
  base.r_max_inner = get_or(j, "r_max_inner", base.r_max_inner);
  base.accumulator_step = get_or(j, "accumulator_step", base.accumulator_step);
  base.radius_step = get_or(j, "radius_step", base.radius_step);
  base.vote_floor = get_or(j, "vote_floor", base.vote_floor);
  base.inner_center_fraction = get_or(j, "inner_center_fraction", base.inner_center_fraction);
  base.synthesized_pupil_ratio =
      get_or(j, "synthesized_pupil_ratio", base.synthesized_pupil_ratio);
  base.validate();
  return base;
}

// Filter bank file:
// {"support_valid_fraction": 0.75,
//  "kernels": [{"wavelength": 6, "sigma_radial": 1.5, "sigma_angular": 2.5,
//               "height": 9, "width": 15, "rows_step": 4, "cols_step": 4},
//              {"height": 3, "width": 3, "real": [[...], ...], "imag": [[...], ...],
//               "rows_step": 4, "cols_step": 4}]}
// A kernel with "real"/"imag" matrices is taken as explicit coefficients,
// otherwise as Gabor parameters. Both are DC-removed and L2-normalized.

namespace detail {

inline std::vector<double> flatten_matrix(const json& m, int height, int width,
                                          const char* which) {
  require(m.is_array() && static_cast<int>(m.size()) == height, ErrorCode::parse_error,
          std::string("kernel '") + which + "' must have 'height' rows");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(height) * width);
  for (const auto& row : m) {
    require(row.is_array() && static_cast<int>(row.size()) == width,
            ErrorCode::parse_error,
            std::string("kernel '") + which + "' rows must have 'width' entries");
    for (const auto& v : row) {
      require(v.is_number(), ErrorCode::parse_error, "kernel coefficients must be numbers");
      out.push_back(v.get<double>());
    }
  }
  return out;
}

inline json matrix_json(const std::vector<double>& v, int height, int width) {
  json m = json::array();
  for (int y = 0; y < height; ++y) {
    json row = json::array();
    for (int x = 0; x < width; ++x) row.push_back(v[static_cast<std::size_t>(y) * width + x]);
    m.push_back(row);
  }
  return m;
}

}  // namespace detail

inline FilterBank filter_bank_from_json(const json& j) {
  using detail::get_or;
  require(j.is_object() && j.contains("kernels") && j.at("kernels").is_array(),
          ErrorCode::parse_error, "filter bank needs a 'kernels' array");
  FilterBank bank;
  bank.support_valid_fraction = get_or(j, "support_valid_fraction", 0.75);
  for (const auto& k : j.at("kernels")) {
    BankEntry e;
    e.rows_step = get_or(k, "rows_step", 4);
    e.cols_step = get_or(k, "cols_step", 4);
    if (k.contains("real") || k.contains("imag")) {
      const int h = detail::get_required<int>(k, "height");
      const int w = detail::get_required<int>(k, "width");
      require(k.contains("real") && k.contains("imag"), ErrorCode::parse_error,
              "explicit kernels need both 'real' and 'imag'");
      e.kernel = make_kernel(h, w, detail::flatten_matrix(k.at("real"), h, w, "real"),
                             detail::flatten_matrix(k.at("imag"), h, w, "imag"));
    } else {
      GaborSpec s;
      s.wavelength = detail::get_required<double>(k, "wavelength");
      s.sigma_radial = detail::get_required<double>(k, "sigma_radial");
      s.sigma_angular = detail::get_required<double>(k, "sigma_angular");
      s.height = detail::get_required<int>(k, "height");
      s.width = detail::get_required<int>(k, "width");
      e.kernel = make_gabor(s);
    }
    bank.entries.push_back(std::move(e));
  }
  bank.validate();
  return bank;
}

/// Writes every kernel with explicit coefficients.
inline json to_json(const FilterBank& bank) {
  json kernels = json::array();
  for (const auto& e : bank.entries) {
    kernels.push_back({{"height", e.kernel.height},
                       {"width", e.kernel.width},
                       {"rows_step", e.rows_step},
                       {"cols_step", e.cols_step},
                       {"real", detail::matrix_json(e.kernel.real, e.kernel.height, e.kernel.width)},
                       {"imag", detail::matrix_json(e.kernel.imag, e.kernel.height, e.kernel.width)}});
  }
  return {{"support_valid_fraction", bank.support_valid_fraction}, {"kernels", kernels}};
}

/// Parametric description of default_bank().
inline json default_bank_json() {
  return json::parse(R"({
  "support_valid_fraction": 0.75,
  "kernels": [
    {"wavelength": 6.0,  "sigma_radial": 1.5, "sigma_angular": 2.5, "height": 9, "width": 15, "rows_step": 4, "cols_step": 4},
    {"wavelength": 12.0, "sigma_radial": 1.5, "sigma_angular": 4.5, "height": 9, "width": 27, "rows_step": 4, "cols_step": 4},
    {"wavelength": 24.0, "sigma_radial": 1.5, "sigma_angular": 8.5, "height": 9, "width": 51, "rows_step": 4, "cols_step": 4}
  ]
})");
}

inline FilterBank load_filter_bank(const std::filesystem::path& path) {
  return filter_bank_from_json(read_json_file(path));
}

inline json to_json(const SynthEyeSpec& s) {
  return {{"identity_seed", s.identity_seed},
          {"nuisance_seed", s.nuisance_seed},
          {"width", s.width},
          {"height", s.height},
          {"pupil", to_json(s.pupil)},
          {"iris", to_json(s.iris)},
          {"occlusion_fraction", s.occlusion_fraction},
          {"noise_sigma", s.noise_sigma},
          {"rotation", s.rotation}};
}

inline SynthEyeSpec synth_spec_from_json(const json& j) {
  using detail::get_required;
  SynthEyeSpec s;
  s.identity_seed = get_required<std::uint64_t>(j, "identity_seed");
  s.nuisance_seed = get_required<std::uint64_t>(j, "nuisance_seed");
  s.width = get_required<int>(j, "width");
  s.height = get_required<int>(j, "height");
  s.pupil = circle_from_json(j.at("pupil"));
  s.iris = circle_from_json(j.at("iris"));
  s.occlusion_fraction = get_required<double>(j, "occlusion_fraction");
  s.noise_sigma = get_required<double>(j, "noise_sigma");
  s.rotation = get_required<double>(j, "rotation");
  return s;
}

/// Settings shared by the command-line tools. Hough fields not given in the
/// file follow HoughConfig::for_width of each mask.
struct RunConfig {
  json hough = json::object();
  int n_radial = 64;
  int n_angular = 512;
  MatchOptions match;
  std::optional<std::filesystem::path> bank_path;

  HoughConfig hough_for_width(int width) const {
    return hough_config_from_json(hough, HoughConfig::for_width(width));
  }
};

inline RunConfig run_config_from_json(const json& j,
                                      const std::filesystem::path& base_dir = {}) {
  using detail::get_or;
  RunConfig cfg;
  if (j.contains("hough")) {
    cfg.hough = j.at("hough");
    require(cfg.hough.is_object(), ErrorCode::parse_error, "'hough' must be an object");
  }
  if (j.contains("normalize")) {
    cfg.n_radial = get_or(j.at("normalize"), "n_radial", cfg.n_radial);
    cfg.n_angular = get_or(j.at("normalize"), "n_angular", cfg.n_angular);
  }
  if (j.contains("match")) {
    cfg.match.max_shift = get_or(j.at("match"), "max_shift", cfg.match.max_shift);
    cfg.match.min_bits = get_or(j.at("match"), "min_bits", cfg.match.min_bits);
  }
  if (j.contains("bank")) {
    std::filesystem::path p = get_or<std::string>(j, "bank", "");
    cfg.bank_path = p.is_relative() ? base_dir / p : p;
  }
  require(cfg.n_radial > 0 && cfg.n_angular > 0, ErrorCode::invalid_argument,
          "normalized size must be positive");
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_json(read_json_file(path), path.parent_path());
}

}  // namespace irisforge
