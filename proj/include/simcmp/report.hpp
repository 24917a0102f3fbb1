#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simcmp/corpus.hpp"
#include "simcmp/lexical.hpp"
#include "simcmp/score_vector.hpp"
#include "simcmp/stats.hpp"

namespace simcmp::report {

// --- configuration -----------------------------------------------------------

struct DatasetSpec {
  std::string name;
  std::filesystem::path path;
  corpus::FileFormat format = corpus::FileFormat::kCsv;
};

enum class MetricKind { kJaccard, kTfIdf, kNegWmd, kEmbedding, kDirect };

struct MetricSpec {
  std::string name;
  MetricKind kind = MetricKind::kJaccard;
  /// Word vector file (negwmd only).
  std::filesystem::path vectors;
  lexical::GroundCost ground_cost = lexical::GroundCost::kEuclidean;
  /// Dataset name -> CEMB1 or direct-score file (embedding and direct only).
  std::map<std::string, std::filesystem::path> files;
};

struct EmitFlags {
  bool json = true;
  bool csv = true;
  bool svg = true;
  bool markdown = true;
};

struct RunConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<MetricSpec> metrics;
  corpus::TokenizerConfig tokenizer;
  std::size_t top_k = 20;
  std::uint64_t seed = stats::kDefaultSeed;
  std::filesystem::path output_dir = "report";
  EmitFlags emit;
  /// Hex SHA-256 of the canonical (key-sorted) config document.
  std::string config_hash;
};

/// Parses a JSON config document. Relative paths resolve against `base_dir`.
/// Throws ConfigError naming the offending field.
RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
/// Checks the cross-field rules (>= 2 datasets, >= 1 metric, inputs per metric).
void validate(const RunConfig& config);

// --- report ------------------------------------------------------------------

struct PairKey {
  std::string a;
  std::string b;
  std::string label() const { return a + " vs " + b; }
};

/// One (metric, dataset pair) cell of the comparison grid.
struct Cell {
  std::optional<stats::PairwiseComparison> comparison;
  std::string error;
  bool ok() const { return comparison.has_value(); }
};

/// Scores of one metric over one dataset plus their descriptive statistics.
struct ScoreEntry {
  std::string dataset;
  std::string metric;
  std::string provider;
  std::optional<ScoreVector> scores;
  stats::Summary summary;
  std::size_t skipped = 0;
  stats::Correlation correlation;
  std::string error;
  bool ok() const { return scores.has_value(); }
};

struct DatasetStatus {
  std::string name;
  std::size_t records = 0;
  std::vector<corpus::RejectedRow> rejected;
  std::string error;
};

struct RankedPair {
  PairKey pair;
  double median_abs_d = 0.0;
  double median_p = 0.0;
  std::size_t metrics_used = 0;
  bool transfer_candidate = false;
};

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = stats::kDefaultSeed;
  std::string version;
  std::string timestamp;
};

using Grid = std::vector<std::vector<std::optional<double>>>;

struct ComparisonReport {
  std::vector<std::string> dataset_names;
  std::vector<std::string> metric_names;  // grid rows
  std::vector<PairKey> pairs;             // grid columns
  std::vector<DatasetStatus> datasets;
  std::vector<corpus::CorpusProfile> profiles;
  std::vector<corpus::Dataset> loaded;     // successfully loaded datasets
  std::vector<ScoreEntry> scores;          // metric-major, then dataset order
  std::vector<std::vector<Cell>> cells;    // [metric][pair]
  std::vector<RankedPair> verdict;
  std::vector<std::string> warnings;
  Provenance provenance;

  Grid p_matrix() const;
  Grid d_matrix() const;
  std::size_t failed_cells() const;
  const ScoreEntry* score(const std::string& dataset, const std::string& metric) const;
};

/// Unordered pairs (i < j) in dataset order.
std::vector<PairKey> dataset_pairs(const std::vector<std::string>& names);

/// Load, profile, score, compare, correlate and rank. Failures are confined
/// to the cells they affect and recorded in the report.
ComparisonReport run_pipeline(const RunConfig& config);

/// Pairs ordered by ascending median |d| across metrics, then descending
/// median p, then pair name. A pair is a transfer candidate when its median
/// |d| < 0.2 and median p > 0.05. Pairs with no usable metric come last.
std::vector<RankedPair> rank_transferability(const std::vector<PairKey>& pairs,
                                             const Grid& d_matrix, const Grid& p_matrix);
std::vector<RankedPair> rank_transferability(const ComparisonReport& report);

/// One-sentence verdict naming the best pair and the decision rule.
std::string verdict_line(const std::vector<RankedPair>& verdict);

// --- serialization -------------------------------------------------------------

/// Full report as JSON text: stable key order, 12 significant digits.
std::string report_json(const ComparisonReport& report);
std::string matrix_csv(const ComparisonReport& report, const Grid& grid);
std::string markdown_summary(const ComparisonReport& report);

/// Standalone profile artifacts used by `simcmp inspect`.
std::string profile_json_text(const corpus::CorpusProfile& profile);
std::string profile_markdown(const corpus::CorpusProfile& profile);

/// Comparison table used by `simcmp compare`.
std::string comparisons_json_text(const std::vector<stats::PairwiseComparison>& rows,
                                  std::uint64_t seed);

/// Writes every enabled artifact into `config.output_dir`; returns the paths written.
std::vector<std::filesystem::path> write_report(const ComparisonReport& report,
                                                const RunConfig& config);

// --- figures ---------------------------------------------------------------

/// "2.6e-19" style: one decimal mantissa, unpadded exponent.
std::string format_sci(double value);

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
  std::string hex() const;
};

/// Sequential colormap; 0 is the dark low end, 1 the bright top end.
Rgb heat_color(double t);

/// log10(p) is clamped to this range before coloring.
inline constexpr double kLog10PFloor = -25.0;

std::string render_heatmap(const Grid& p_matrix, const std::vector<std::string>& rows,
                           const std::vector<std::string>& cols);
std::string render_bar_chart(const Grid& d_matrix, const std::vector<std::string>& rows,
                             const std::vector<std::string>& cols);
std::string render_label_score_plot(const corpus::Dataset& dataset, const ScoreVector& scores);

/// Throw UsageError for an empty grid and IoError when `path` cannot be written.
void emit_heatmap(const Grid& p_matrix, const std::vector<std::string>& rows,
                  const std::vector<std::string>& cols, const std::filesystem::path& path);
void emit_bar_chart(const Grid& d_matrix, const std::vector<std::string>& rows,
                    const std::vector<std::string>& cols, const std::filesystem::path& path);
void emit_label_score_plot(const corpus::Dataset& dataset, const ScoreVector& scores,
                           const std::filesystem::path& path);

}  // namespace simcmp::report
