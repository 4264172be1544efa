// irisforge command-line tool.
//
// Exit codes: 0 ok, 2 bad usage, 3 data error, 4 internal error. Failures
// print one JSON line {"error": code, "detail": text} on stderr.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "irisforge/pipeline.hpp"

namespace {

using namespace irisforge;

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

void report_error(const std::string& code, const std::string& detail) {
  std::cerr << json{{"error", code}, {"detail", detail}}.dump() << '\n';
}

struct Common {
  std::string config;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
};

RunConfig load_config(const Common& c) {
  if (!c.config.empty()) return load_run_config(c.config);
  if (const char* env = std::getenv("IRISFORGE_CONFIG"); env != nullptr && *env != '\0') {
    return load_run_config(env);
  }
  return {};
}

std::optional<fs::path> opt_path(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return fs::path(s);
}

void add_config(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON run configuration (default: $IRISFORGE_CONFIG)");
}

void add_jobs(CLI::App* cmd, Common& c) {
  cmd->add_option("--jobs,-j", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"irisforge: iris recognition from segmentation masks"};
  app.require_subcommand(1);
  Common common;

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic eye dataset");
  DatasetOptions synth_opt;
  std::string synth_out;
  synth->add_option("--count", synth_opt.identities, "Number of eye identities")
      ->required()
      ->check(CLI::PositiveNumber);
  synth->add_option("--samples", synth_opt.samples_per_identity, "Samples per identity")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_opt.seed, "Dataset seed");
  synth->add_option("--width", synth_opt.width, "Image width")->check(CLI::PositiveNumber);
  synth->add_option("--height", synth_opt.height, "Image height")->check(CLI::PositiveNumber);
  synth->add_option("--noise", synth_opt.noise_sigma, "Sensor noise sigma (grey levels)")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--max-occlusion", synth_opt.max_occlusion,
                    "Largest eyelid-covered share of the iris");
  synth->add_option("--out", synth_out, "Output directory")->required();
  add_jobs(synth, common);

  // seg-eval
  auto* seg = app.add_subcommand("seg-eval", "Score predicted masks against ground truth");
  std::string seg_pred, seg_gt, seg_out, seg_csv;
  seg->add_option("--pred", seg_pred, "Predicted mask directory")->required();
  seg->add_option("--gt", seg_gt, "Ground-truth mask directory")->required();
  seg->add_option("--out", seg_out, "Summary JSON")->required();
  seg->add_option("--csv", seg_csv, "Per-file CSV (default: summary path with .csv)");
  add_jobs(seg, common);

  // fit
  auto* fit = app.add_subcommand("fit", "Fit pupil and iris circles to a mask");
  std::string fit_mask_path, fit_out;
  fit->add_option("--mask", fit_mask_path, "Mask PNG")->required();
  fit->add_option("--out", fit_out, "Circles JSON")->required();
  add_config(fit, common);

  // normalize
  auto* norm = app.add_subcommand("normalize", "Unwrap the iris to a rectangle");
  std::string norm_image, norm_mask, norm_circles, norm_prefix;
  norm->add_option("--image", norm_image, "Eye image PNG")->required();
  norm->add_option("--mask", norm_mask, "Mask PNG")->required();
  norm->add_option("--circles", norm_circles, "Circles JSON")->required();
  norm->add_option("--out-prefix", norm_prefix, "Writes <P>_tex.png and <P>_valid.png")
      ->required();
  add_config(norm, common);

  // encode
  auto* enc = app.add_subcommand("encode", "Compute an iris code");
  std::string enc_image, enc_mask, enc_circles, enc_bank, enc_out;
  enc->add_option("--image", enc_image, "Eye image PNG")->required();
  enc->add_option("--mask", enc_mask, "Mask PNG")->required();
  enc->add_option("--circles", enc_circles, "Circles JSON (fitted from the mask if absent)");
  enc->add_option("--bank", enc_bank, "Filter bank JSON (built-in bank if absent)");
  enc->add_option("--out", enc_out, "Iris code file")->required();
  add_config(enc, common);

  // match
  auto* mat = app.add_subcommand("match", "Score code pairs listed in a manifest");
  std::string mat_manifest, mat_out;
  std::optional<int> mat_shift, mat_bits;
  mat->add_option("--manifest", mat_manifest, "CSV code_a,code_b,label")->required();
  mat->add_option("--out", mat_out, "Scores CSV")->required();
  mat->add_option("--max-shift", mat_shift, "Largest angular shift tried (default 16)")
      ->check(CLI::NonNegativeNumber);
  mat->add_option("--min-bits", mat_bits, "Fewest jointly valid bits (default 128)")
      ->check(CLI::PositiveNumber);
  add_config(mat, common);
  add_jobs(mat, common);

  // roc
  auto* rocc = app.add_subcommand("roc", "ROC curve, EER and class statistics");
  std::string roc_scores, roc_prefix;
  rocc->add_option("--scores", roc_scores, "Scores CSV")->required();
  rocc->add_option("--out-prefix", roc_prefix,
                   "Writes <P>_roc.csv, <P>_summary.json, <P>_boxplot.csv")
      ->required();

  // augment
  auto* aug = app.add_subcommand("augment", "Blur and edge-enhance every image in a directory");
  std::string aug_in, aug_out;
  aug->add_option("--in", aug_in, "Input PNG directory")->required();
  aug->add_option("--out", aug_out, "Output directory")->required();
  add_jobs(aug, common);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "Dataset to codes, scores and ROC report");
  std::string pipe_dataset, pipe_out, pipe_bank;
  pipe->add_option("--dataset", pipe_dataset, "Directory with images/ and masks/")->required();
  pipe->add_option("--out", pipe_out, "Output directory")->required();
  pipe->add_option("--bank", pipe_bank, "Filter bank JSON (built-in bank if absent)");
  add_config(pipe, common);
  add_jobs(pipe, common);

  // default-bank
  auto* dbank = app.add_subcommand("default-bank", "Write the built-in filter bank as JSON");
  std::string dbank_out;
  dbank->add_option("--out", dbank_out, "Filter bank JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << '\n';
    report_error("usage", e.what());
    return kExitUsage;
  }

  try {
    if (*synth) {
      const auto samples = write_synth_dataset(synth_opt, synth_out, common.jobs);
      std::cout << json{{"samples", samples.size()}, {"out", synth_out}}.dump() << '\n';
    } else if (*seg) {
      const fs::path csv =
          seg_csv.empty() ? fs::path(seg_out).replace_extension(".csv") : fs::path(seg_csv);
      const auto r = evaluate_segmentation(seg_pred, seg_gt, common.jobs);
      write_seg_eval(r, seg_out, csv);
      std::cout << json{{"n", r.files.size()}, {"iou", to_json(r.iou)}, {"hd", to_json(r.hd)}}
                       .dump()
                << '\n';
    } else if (*fit) {
      const auto b = fit_mask(load_mask(fit_mask_path), load_config(common));
      write_json_file(to_json(b), fit_out);
    } else if (*norm) {
      const auto n = normalize_eye(load_gray_image(norm_image), load_mask(norm_mask),
                                   boundaries_from_json(read_json_file(norm_circles)),
                                   load_config(common));
      save_gray_image(texture_image(n), norm_prefix + "_tex.png");
      save_mask(valid_mask(n), norm_prefix + "_valid.png");
    } else if (*enc) {
      const auto cfg = load_config(common);
      const auto bank = resolve_bank(opt_path(enc_bank), cfg);
      const auto image = load_gray_image(enc_image);
      const auto mask = load_mask(enc_mask);
      const auto b = enc_circles.empty() ? fit_mask(mask, cfg)
                                         : boundaries_from_json(read_json_file(enc_circles));
      write_iris_code(encode_eye(image, mask, b, cfg, bank), enc_out);
    } else if (*mat) {
      auto opt = load_config(common).match;
      if (mat_shift) opt.max_shift = *mat_shift;
      if (mat_bits) opt.min_bits = *mat_bits;
      const fs::path manifest = mat_manifest;
      const auto rows = read_manifest(manifest);
      write_scores(score_manifest(rows, manifest.parent_path(), opt, common.jobs), mat_out);
    } else if (*rocc) {
      const auto r = roc_report(read_scores(roc_scores));
      write_roc_report(r, ReportPaths::from_prefix(roc_prefix));
      std::cout << json{{"eer", r.curve.eer}}.dump() << '\n';
    } else if (*aug) {
      const auto n = augment_directory(aug_in, aug_out, common.jobs);
      std::cout << json{{"inputs", n}, {"outputs", 5 * n}}.dump() << '\n';
    } else if (*pipe) {
      const auto cfg = load_config(common);
      const auto bank = resolve_bank(opt_path(pipe_bank), cfg);
      const auto r = run_pipeline(pipe_dataset, pipe_out, cfg, bank, common.jobs);
      auto s = summary_json(r.report);
      s["encoded"] = r.encoded.size();
      s["failed"] = r.failures.size();
      std::cout << s.dump() << '\n';
    } else if (*dbank) {
      write_json_file(default_bank_json(), dbank_out);
    }
  } catch (const Error& e) {
    report_error(std::string(to_string(e.code())), e.what());
    return kExitData;
  } catch (const std::exception& e) {
    report_error("internal", e.what());
    return kExitInternal;
  }
  return 0;
}
