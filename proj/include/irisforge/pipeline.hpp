#pragma once

// Whole-file operations behind the command-line subcommands. `pipeline` is
// built from the same functions as the individual steps, so running the steps
// by hand produces the same files.

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "irisforge/augment.hpp"
#include "irisforge/batch.hpp"
#include "irisforge/circlefit.hpp"
#include "irisforge/encode.hpp"
#include "irisforge/eval.hpp"
#include "irisforge/iris_code.hpp"
#include "irisforge/match.hpp"
#include "irisforge/metrics.hpp"
#include "irisforge/normalize.hpp"
#include "irisforge/png_io.hpp"
#include "irisforge/serialize.hpp"
#include "irisforge/synth.hpp"

namespace irisforge {

// ---- segmentation evaluation ----------------------------------------------

struct SegEvalFile {
  std::string stem;
  SegScore score;
};

struct SegEvalReport {
  std::vector<SegEvalFile> files;  // sorted by stem
  MetricSummary iou;
  MetricSummary hd;
  std::vector<std::string> unmatched_pred;
  std::vector<std::string> unmatched_gt;
};

/// Pairs prediction and ground-truth masks by stem. A prediction whose size
/// differs from its ground truth is resized nearest-neighbour first.
inline SegEvalReport evaluate_segmentation(const fs::path& pred_dir,
                                           const fs::path& gt_dir, int jobs) {
  const auto pred = list_pngs(pred_dir);
  const auto gt = list_pngs(gt_dir);
  SegEvalReport report;
  std::vector<std::string> stems;
  for (const auto& [stem, _] : pred) {
    (gt.count(stem) ? stems : report.unmatched_pred).push_back(stem);
  }
  for (const auto& [stem, _] : gt) {
    if (!pred.count(stem)) report.unmatched_gt.push_back(stem);
  }
  require(!stems.empty(), ErrorCode::empty_input,
          "no prediction shares a file stem with the ground truth");
  report.files = parallel_map(stems.size(), jobs, [&](std::size_t i) {
    const auto& stem = stems[i];
    auto p = load_mask(pred.at(stem));
    const auto g = load_mask(gt.at(stem));
    if (!p.same_shape(g)) p = resize_mask_nn(p, g.width(), g.height());
    return SegEvalFile{stem, score_segmentation(p, g)};
  });
  std::vector<double> ious, hds;
  for (const auto& f : report.files) {
    ious.push_back(f.score.iou);
    hds.push_back(f.score.hd);
  }
  report.iou = summarize(ious);
  report.hd = summarize(hds);
  return report;
}

inline json to_json(const MetricSummary& s) {
  return {{"mean", s.mean}, {"std", s.std_dev}, {"n", s.n}};
}

inline void write_seg_eval(const SegEvalReport& r, const fs::path& summary_path,
                           const fs::path& csv_path) {
  std::ofstream csv(csv_path, std::ios::trunc);
  csv << "stem,iou,hd\n";
  for (const auto& f : r.files) {
    csv << f.stem << ',' << format_double(f.score.iou) << ',' << format_double(f.score.hd)
        << '\n';
  }
  require(static_cast<bool>(csv), ErrorCode::io_failure, "cannot write " + csv_path.string());
  write_json_file({{"n", r.files.size()},
                   {"iou", to_json(r.iou)},
                   {"hd", to_json(r.hd)},
                   {"unmatched_pred", r.unmatched_pred},
                   {"unmatched_gt", r.unmatched_gt},
                   {"per_file", csv_path.filename().string()}},
                  summary_path);
}

// ---- per-eye front end ----------------------------------------------------

inline IrisBoundaries fit_mask(const BinaryMask& mask, const RunConfig& cfg) {
  return fit_boundaries(mask, cfg.hough_for_width(mask.width()));
}

inline NormalizedIris normalize_eye(const GrayImage& image, const BinaryMask& mask,
                                    const IrisBoundaries& b, const RunConfig& cfg) {
  return rubber_sheet(image, mask, b, cfg.n_radial, cfg.n_angular);
}

inline IrisCode encode_eye(const GrayImage& image, const BinaryMask& mask,
                           const IrisBoundaries& b, const RunConfig& cfg,
                           const FilterBank& bank) {
  return encode(normalize_eye(image, mask, b, cfg), bank);
}

inline FilterBank resolve_bank(const std::optional<fs::path>& flag, const RunConfig& cfg) {
  if (flag) return load_filter_bank(*flag);
  if (cfg.bank_path) return load_filter_bank(*cfg.bank_path);
  return default_bank();
}

// ---- matching -------------------------------------------------------------

inline fs::path resolve_relative(const fs::path& p, const fs::path& base) {
  return p.is_relative() ? base / p : p;
}

/// Scores every manifest row; pairs without enough jointly valid bits get
/// status "insufficient_overlap" instead of a score.
inline std::vector<ScoreRow> score_manifest(const std::vector<ManifestRow>& rows,
                                            const fs::path& base_dir,
                                            const MatchOptions& opt, int jobs) {
  std::vector<std::string> paths;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& r : rows) {
    for (const auto* p : {&r.code_a, &r.code_b}) {
      if (index.emplace(*p, paths.size()).second) paths.push_back(*p);
    }
  }
  const auto codes = parallel_map(paths.size(), jobs, [&](std::size_t i) {
    return read_iris_code(resolve_relative(paths[i], base_dir));
  });
  return parallel_map(rows.size(), jobs, [&](std::size_t i) {
    const auto& r = rows[i];
    ScoreRow out;
    out.pair = i;
    out.label = r.label;
    try {
      const auto m = match(codes[index.at(r.code_a)], codes[index.at(r.code_b)], opt);
      out.score = m.score;
      out.shift = m.best_shift;
      out.bits_compared = m.bits_compared;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::insufficient_overlap) throw;
      out.status = to_string(e.code());
    }
    return out;
  });
}

// ---- reporting ------------------------------------------------------------

struct RocReport {
  RocCurve curve;
  ScoreSummary summary;
  std::size_t skipped = 0;
};

inline RocReport roc_report(const std::vector<ScoreRow>& rows) {
  const auto set = score_set_from_rows(rows);
  RocReport r{roc(set), summarize_scores(set), 0};
  for (const auto& row : rows) r.skipped += row.status == "ok" ? 0 : 1;
  return r;
}

inline json to_json(const ClassStats& s) {
  return {{"n", s.n},     {"min", s.min},   {"q1", s.q1},   {"median", s.median},
          {"q3", s.q3},   {"max", s.max},   {"mean", s.mean}, {"std", s.std_dev}};
}

struct ReportPaths {
  fs::path roc;
  fs::path summary;
  fs::path boxplot;

  /// P_roc.csv, P_summary.json, P_boxplot.csv.
  static ReportPaths from_prefix(const std::string& prefix) {
    return {prefix + "_roc.csv", prefix + "_summary.json", prefix + "_boxplot.csv"};
  }
  static ReportPaths in_dir(const fs::path& dir) {
    return {dir / "roc.csv", dir / "summary.json", dir / "boxplot.csv"};
  }
};

inline json summary_json(const RocReport& r) {
  return {{"eer", r.curve.eer},
          {"n_genuine", r.summary.genuine.n},
          {"n_impostor", r.summary.impostor.n},
          {"n_skipped", r.skipped},
          {"genuine", to_json(r.summary.genuine)},
          {"impostor", to_json(r.summary.impostor)}};
}

inline void write_roc_report(const RocReport& r, const ReportPaths& paths) {
  {
    std::ofstream out(paths.roc, std::ios::trunc);
    out << "threshold,fmr,fnmr\n";
    for (const auto& p : r.curve.points) {
      out << format_double(p.threshold, 12) << ',' << format_double(p.fmr, 12) << ','
          << format_double(p.fnmr, 12) << '\n';
    }
    require(static_cast<bool>(out), ErrorCode::io_failure, "cannot write " + paths.roc.string());
  }
  {
    std::ofstream out(paths.boxplot, std::ios::trunc);
    out << "class,n,min,q1,median,q3,max,mean,std\n";
    const auto row = [&](const char* name, const ClassStats& s) {
      out << name << ',' << s.n << ',' << format_double(s.min) << ',' << format_double(s.q1)
          << ',' << format_double(s.median) << ',' << format_double(s.q3) << ','
          << format_double(s.max) << ',' << format_double(s.mean) << ','
          << format_double(s.std_dev) << '\n';
    };
    row("genuine", r.summary.genuine);
    row("impostor", r.summary.impostor);
    require(static_cast<bool>(out), ErrorCode::io_failure,
            "cannot write " + paths.boxplot.string());
  }
  write_json_file(summary_json(r), paths.summary);
}

// ---- synthetic dataset ----------------------------------------------------

/// Writes images/, masks/ and truth.jsonl (one line per sample, stem order).
inline std::vector<SynthSample> write_synth_dataset(const DatasetOptions& opt,
                                                    const fs::path& out_dir, int jobs) {
  const auto samples = make_dataset_specs(opt);
  fs::create_directories(out_dir / "images");
  fs::create_directories(out_dir / "masks");
  const auto truths = parallel_map(samples.size(), jobs, [&](std::size_t i) {
    const auto eye = generate(samples[i].spec);
    save_gray_image(eye.image, out_dir / "images" / (samples[i].stem + ".png"));
    save_mask(eye.mask, out_dir / "masks" / (samples[i].stem + ".png"));
    return eye.truth;
  });
  std::ofstream truth(out_dir / "truth.jsonl", std::ios::trunc);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    truth << json{{"stem", samples[i].stem},
                  {"identity", samples[i].identity},
                  {"spec", to_json(samples[i].spec)},
                  {"truth", to_json(truths[i])}}
                 .dump()
          << '\n';
  }
  require(static_cast<bool>(truth), ErrorCode::io_failure, "cannot write truth.jsonl");
  return samples;
}

// ---- augmentation ---------------------------------------------------------

/// Five variants of every PNG in in_dir; returns the number of inputs.
inline std::size_t augment_directory(const fs::path& in_dir, const fs::path& out_dir,
                                     int jobs) {
  const auto files = list_pngs(in_dir);
  std::vector<std::pair<std::string, fs::path>> items(files.begin(), files.end());
  fs::create_directories(out_dir);
  parallel_map(items.size(), jobs, [&](std::size_t i) {
    const auto variants = augment_five_fold(load_gray_image(items[i].second));
    for (std::size_t v = 0; v < variants.size(); ++v) {
      save_gray_image(variants[v], out_dir / (items[i].first + kAugmentSuffixes[v] + ".png"));
    }
    return 0;
  });
  return items.size();
}

// ---- end to end -----------------------------------------------------------

struct PipelineFailure {
  std::string stem;
  std::string code;
  std::string detail;
};

struct PipelineResult {
  std::vector<std::string> encoded;  // stems with a code, sorted
  std::vector<PipelineFailure> failures;
  RocReport report;
};

/// Dataset layout: images/<stem>.png with masks/<stem>.png. Writes
/// circles/<stem>.json, codes/<stem>.bin, pairs.csv (all pairs, labelled by
/// the identity part of the stem), scores.csv, roc.csv, summary.json,
/// boxplot.csv and, when any eye could not be processed, failures.csv.
inline PipelineResult run_pipeline(const fs::path& dataset, const fs::path& out,
                                   const RunConfig& cfg, const FilterBank& bank, int jobs) {
  const auto images = list_pngs(dataset / "images");
  const auto masks = list_pngs(dataset / "masks");
  std::vector<std::string> stems;
  PipelineResult result;
  for (const auto& [stem, _] : images) {
    if (masks.count(stem)) {
      stems.push_back(stem);
    } else {
      result.failures.push_back({stem, "file_not_found", "no mask with this stem"});
    }
  }
  require(!stems.empty(), ErrorCode::empty_input, "dataset has no image/mask pairs");
  fs::create_directories(out / "circles");
  fs::create_directories(out / "codes");

  const auto outcome = parallel_map(stems.size(), jobs, [&](std::size_t i) {
    const auto& stem = stems[i];
    try {
      const auto image = load_gray_image(images.at(stem));
      const auto mask = load_mask(masks.at(stem));
      const auto b = fit_mask(mask, cfg);
      write_json_file(to_json(b), out / "circles" / (stem + ".json"));
      write_iris_code(encode_eye(image, mask, b, cfg, bank), out / "codes" / (stem + ".bin"));
      return std::optional<PipelineFailure>{};
    } catch (const Error& e) {
      return std::optional<PipelineFailure>{PipelineFailure{stem, std::string(to_string(e.code())), e.what()}};
    }
  });
  for (std::size_t i = 0; i < stems.size(); ++i) {
    if (outcome[i]) {
      result.failures.push_back(*outcome[i]);
    } else {
      result.encoded.push_back(stems[i]);
    }
  }
  std::sort(result.failures.begin(), result.failures.end(),
            [](const auto& a, const auto& b) { return a.stem < b.stem; });
  if (!result.failures.empty()) {
    std::ofstream f(out / "failures.csv", std::ios::trunc);
    f << "stem,error\n";
    for (const auto& x : result.failures) f << x.stem << ',' << x.code << '\n';
  }

  std::vector<ManifestRow> pairs;
  const auto& e = result.encoded;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      pairs.push_back({"codes/" + e[i] + ".bin", "codes/" + e[j] + ".bin",
                       identity_of(e[i]) == identity_of(e[j]) ? PairLabel::genuine
                                                              : PairLabel::impostor});
    }
  }
  require(!pairs.empty(), ErrorCode::empty_input, "fewer than two eyes were encoded");
  write_manifest(pairs, out / "pairs.csv");
  const auto scores = score_manifest(pairs, out, cfg.match, jobs);
  write_scores(scores, out / "scores.csv");
  // Report from the scores as written, the same input `roc` would read.
  result.report = roc_report(read_scores(out / "scores.csv"));
  write_roc_report(result.report, ReportPaths::in_dir(out));
  return result;
}

}  // namespace irisforge
