#pragma once

// Batch plumbing shared by the command-line tools: a worker pool whose
// results come back in input order, dataset directory listing, and the pair
// manifest / score CSV formats.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "irisforge/error.hpp"
#include "irisforge/eval.hpp"
#include "irisforge/match.hpp"

namespace irisforge {

namespace fs = std::filesystem;

/// Runs fn(i) for i in [0, n) on `jobs` threads. Results keep index order;
/// the first exception (by index) is rethrown after all workers finish.
template <class Fn>
auto parallel_map(std::size_t n, int jobs, Fn&& fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using Result = decltype(fn(std::size_t{}));
  std::vector<std::optional<Result>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<Result> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

/// stem -> path for every *.png directly inside dir, sorted by stem.
inline std::map<std::string, fs::path> list_pngs(const fs::path& dir) {
  std::error_code ec;
  require(fs::is_directory(dir, ec), ErrorCode::file_not_found,
          "no such directory: " + dir.string());
  std::map<std::string, fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png") out.emplace(entry.path().stem().string(), entry.path());
  }
  return out;
}

/// Eye identity encoded in a sample stem: everything before the last '_'.
inline std::string identity_of(const std::string& stem) {
  const auto pos = stem.rfind('_');
  return pos == std::string::npos || pos == 0 ? stem : stem.substr(0, pos);
}

inline std::string format_double(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
  }
  return fields;
}

enum class PairLabel { genuine, impostor };

inline std::string to_string(PairLabel l) {
  return l == PairLabel::genuine ? "genuine" : "impostor";
}

inline PairLabel parse_label(const std::string& s) {
  if (s == "genuine") return PairLabel::genuine;
  if (s == "impostor") return PairLabel::impostor;
  throw Error(ErrorCode::parse_error, "label must be 'genuine' or 'impostor', got '" + s + "'");
}

struct ManifestRow {
  std::string code_a;
  std::string code_b;
  PairLabel label = PairLabel::impostor;
};

/// Manifest CSV: header "code_a,code_b,label" (optional on read), one pair
/// per line. Relative code paths resolve against the manifest's directory.
inline std::vector<ManifestRow> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::file_not_found, "cannot open " + path.string());
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    if (line_no == 1 && f.size() == 3 && f[2] == "label") continue;
    require(f.size() == 3, ErrorCode::parse_error,
            path.string() + ":" + std::to_string(line_no) + ": expected 3 fields");
    rows.push_back({f[0], f[1], parse_label(f[2])});
  }
  return rows;
}

inline void write_manifest(const std::vector<ManifestRow>& rows, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  out << "code_a,code_b,label\n";
  for (const auto& r : rows) out << r.code_a << ',' << r.code_b << ',' << to_string(r.label) << '\n';
  require(static_cast<bool>(out), ErrorCode::io_failure, "cannot write " + path.string());
}

struct ScoreRow {
  std::size_t pair = 0;
  PairLabel label = PairLabel::impostor;
  double score = 0.0;
  int shift = 0;
  std::size_t bits_compared = 0;
  /// "ok" or the error code that prevented a score.
  std::string status = "ok";
};

/// Scores CSV: pair,label,score,shift,bits_compared,status.
inline void write_scores(const std::vector<ScoreRow>& rows, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  out << "pair,label,score,shift,bits_compared,status\n";
  for (const auto& r : rows) {
    out << r.pair << ',' << to_string(r.label) << ','
        << (r.status == "ok" ? format_double(r.score) : std::string{}) << ','
        << r.shift << ',' << r.bits_compared << ',' << r.status << '\n';
  }
  require(static_cast<bool>(out), ErrorCode::io_failure, "cannot write " + path.string());
}

inline std::vector<ScoreRow> read_scores(const fs::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::file_not_found, "cannot open " + path.string());
  std::vector<ScoreRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto f = split_csv_line(line);
    if (line_no == 1 && !f.empty() && f[0] == "pair") continue;
    require(f.size() == 6, ErrorCode::parse_error,
            path.string() + ":" + std::to_string(line_no) + ": expected 6 fields");
    ScoreRow r;
    try {
      r.pair = std::stoul(f[0]);
      r.label = parse_label(f[1]);
      r.status = f[5];
      if (r.status == "ok") r.score = std::stod(f[2]);
      r.shift = std::stoi(f[3]);
      r.bits_compared = std::stoul(f[4]);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::parse_error,
                  path.string() + ":" + std::to_string(line_no) + ": malformed number");
    }
    rows.push_back(r);
  }
  return rows;
}

/// Scored rows split by label; rows without a score are left out.
inline ScoreSet score_set_from_rows(const std::vector<ScoreRow>& rows) {
  ScoreSet s;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    (r.label == PairLabel::genuine ? s.genuine : s.impostor).push_back(r.score);
  }
  return s;
}

}  // namespace irisforge
