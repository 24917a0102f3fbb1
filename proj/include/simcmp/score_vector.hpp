#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace simcmp {

struct ScoredRecord {
  std::string id;
  double score = 0.0;

  friend bool operator==(const ScoredRecord&, const ScoredRecord&) = default;
};

/// Per-record similarity scores of one metric over one dataset.
///
/// `scored` follows dataset order. Every record is either scored or listed in
/// `skipped` (for instance a sentence with no in-vocabulary token under WMD).
struct ScoreVector {
  std::string dataset_name;
  std::string metric_name;
  std::vector<ScoredRecord> scored;
  std::vector<std::string> skipped;

  std::size_t size() const noexcept { return scored.size(); }
  std::vector<double> values() const;
};

/// `id,score` CSV, scores with 17 significant digits.
void write_scores_csv(const ScoreVector& scores, std::ostream& out);

/// Writes `path` as CSV and `path` + ".skipped" with one skipped id per line.
/// Throws IoError when either file cannot be written.
void export_scores(const ScoreVector& scores, const std::filesystem::path& path);

std::filesystem::path skipped_sidecar_path(const std::filesystem::path& path);

}  // namespace simcmp
