#include <gtest/gtest.h>

#include <fstream>

#include "irisforge/serialize.hpp"
#include "support.hpp"

using namespace irisforge;
using testing_support::TempDir;

TEST(BoundariesJson, RoundTripIsExact) {
  const IrisBoundaries b{{160.123456789012, 119.9, 27.25}, {161.0 / 3.0 + 100, 120.5, 71.75}, true};
  const auto text = to_json(b).dump();
  EXPECT_EQ(boundaries_from_json(json::parse(text)), b);
  const auto j = json::parse(text);
  EXPECT_TRUE(j.contains("pupil"));
  EXPECT_TRUE(j["iris"].contains("r"));
  EXPECT_TRUE(j["pupil_synthesized"].get<bool>());
}

TEST(BoundariesJson, RejectsBrokenInput) {
  EXPECT_ERROR_CODE(boundaries_from_json(json::parse(R"({"pupil": {"cx": 1, "cy": 1, "r": 1}})")),
                    ErrorCode::parse_error);
  EXPECT_ERROR_CODE(
      boundaries_from_json(json::parse(R"({"pupil": {"cx": 1, "cy": 1, "r": 9}, "iris": {"cx": 1, "cy": 1, "r": 5}})")),
      ErrorCode::invalid_argument);
  EXPECT_ERROR_CODE(circle_from_json(json::parse(R"({"cx": "a", "cy": 1, "r": 1})")), ErrorCode::parse_error);
}

TEST(HoughJson, OverridesOnlyGivenFields) {
  const auto base = HoughConfig::for_width(320);
  const auto c = hough_config_from_json(json::parse(R"({"r_max_outer": 150, "vote_floor": 0.3})"), base);
  EXPECT_EQ(c.r_max_outer, 150);
  EXPECT_DOUBLE_EQ(c.vote_floor, 0.3);
  EXPECT_EQ(c.r_min_outer, base.r_min_outer);
  EXPECT_EQ(c.r_min_inner, base.r_min_inner);
  EXPECT_ERROR_CODE(hough_config_from_json(json::parse(R"({"r_min_outer": 500})"), base),
                    ErrorCode::invalid_argument);
}

TEST(FilterBankJson, ParametricMatchesBuiltIn) {
  const auto a = filter_bank_from_json(default_bank_json());
  const auto b = default_bank();
  ASSERT_EQ(a.entries.size(), b.entries.size());
  for (std::size_t k = 0; k < a.entries.size(); ++k) {
    EXPECT_EQ(a.entries[k].kernel.real, b.entries[k].kernel.real);
    EXPECT_EQ(a.entries[k].kernel.imag, b.entries[k].kernel.imag);
    EXPECT_EQ(a.entries[k].rows_step, b.entries[k].rows_step);
  }
}

TEST(FilterBankJson, ExplicitCoefficientsRoundTrip) {
  const auto bank = default_bank();
  const auto again = filter_bank_from_json(json::parse(to_json(bank).dump()));
  ASSERT_EQ(again.entries.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& x = again.entries[k].kernel.real;
    const auto& y = bank.entries[k].kernel.real;
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(x[i], y[i], 1e-12);
  }
}

TEST(FilterBankJson, ExplicitKernelIsNormalized) {
  const auto bank = filter_bank_from_json(json::parse(R"({
    "kernels": [{"height": 1, "width": 3, "rows_step": 2, "cols_step": 2,
                 "real": [[1, 2, 3]], "imag": [[0, 5, 0]]}]})"));
  const auto& k = bank.entries[0].kernel;
  EXPECT_NEAR(k.re(0, 0), -1 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(k.re(0, 1), 0.0, 1e-12);
  EXPECT_NEAR(k.im(0, 1), 2 / std::sqrt(6.0), 1e-12);
  EXPECT_EQ(bank.entries[0].rows_step, 2);
  EXPECT_ERROR_CODE(filter_bank_from_json(json::parse(R"({"kernels": [{"height": 1, "width": 3, "real": [[1, 2]], "imag": [[0, 5, 0]]}]})")),
                    ErrorCode::parse_error);
  EXPECT_ERROR_CODE(filter_bank_from_json(json::parse(R"({"kernels": []})")), ErrorCode::invalid_argument);
  EXPECT_ERROR_CODE(filter_bank_from_json(json::parse(R"({"kernels": [{"wavelength": 4}]})")), ErrorCode::parse_error);
}

TEST(SynthSpecJson, RoundTrip) {
  SynthEyeSpec s;
  s.identity_seed = 0xfedcba9876543210ull;
  s.nuisance_seed = 3;
  s.rotation = -0.0123;
  s.occlusion_fraction = 0.17;
  const auto back = synth_spec_from_json(json::parse(to_json(s).dump()));
  EXPECT_EQ(back.identity_seed, s.identity_seed);
  EXPECT_EQ(back.rotation, s.rotation);
  EXPECT_EQ(back.iris, s.iris);
}

TEST(RunConfig, FileAndDefaults) {
  TempDir dir("cfg");
  {
    std::ofstream out(dir / "cfg.json");
    out << R"({"hough": {"vote_floor": 0.25}, "normalize": {"n_radial": 32},
               "match": {"max_shift": 4, "min_bits": 64}, "bank": "bank.json"})";
  }
  const auto cfg = load_run_config(dir / "cfg.json");
  EXPECT_EQ(cfg.n_radial, 32);
  EXPECT_EQ(cfg.n_angular, 512);
  EXPECT_EQ(cfg.match.max_shift, 4);
  EXPECT_EQ(cfg.match.min_bits, 64u);
  ASSERT_TRUE(cfg.bank_path.has_value());
  EXPECT_EQ(*cfg.bank_path, dir / "bank.json");
  const auto h = cfg.hough_for_width(640);
  EXPECT_DOUBLE_EQ(h.vote_floor, 0.25);
  EXPECT_EQ(h.r_min_outer, 80);

  const RunConfig plain;
  EXPECT_EQ(plain.match.max_shift, 16);
  EXPECT_EQ(plain.match.min_bits, 128u);
  EXPECT_FALSE(plain.bank_path.has_value());
  EXPECT_ERROR_CODE(load_run_config(dir / "missing.json"), ErrorCode::file_not_found);
  {
    std::ofstream out(dir / "bad.json");
    out << "{ not json";
  }
  EXPECT_ERROR_CODE(load_run_config(dir / "bad.json"), ErrorCode::parse_error);
}
