#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace simcmp::corpus {

/// One row of a sentence-pair dataset. `label` is the gold similarity in [0, 5].
struct PairRecord {
  std::string id;
  std::string sentence1;
  std::string sentence2;
  double label = 0.0;

  friend bool operator==(const PairRecord&, const PairRecord&) = default;
};

/// Records keep file order. A loaded dataset always holds at least two records.
struct Dataset {
  std::string name;
  std::vector<PairRecord> records;

  std::size_t size() const noexcept { return records.size(); }
  const PairRecord* find(std::string_view id) const;
};

enum class FileFormat { kCsv, kTsv, kJsonl };

/// Parses "csv", "tsv" or "jsonl"; throws UsageError otherwise.
FileFormat parse_format(std::string_view name);
/// Guesses the format from a file extension; throws UsageError when unknown.
FileFormat format_from_extension(const std::filesystem::path& path);
std::string_view format_name(FileFormat format);

/// A row dropped during loading. `row` is 1-based over data rows (header excluded).
struct RejectedRow {
  std::size_t row = 0;
  std::string reason;
};

struct LoadOptions {
  /// Throw ValidationError on the first bad row instead of collecting it.
  bool strict = false;
  /// Dataset name; empty means the file stem.
  std::string name;
};

struct LoadResult {
  Dataset dataset;
  std::vector<RejectedRow> rejected;
};

/// Loads and validates a dataset. Bad rows are rejected and reported; loading
/// aborts with TooSmallError when fewer than two valid rows remain.
LoadResult load_dataset(const std::filesystem::path& path, FileFormat format,
                        const LoadOptions& options = {});

/// Builds a dataset from in-memory records with the same validation as a file load.
Dataset make_dataset(std::string name, std::vector<PairRecord> records);

// --- tokenization --------------------------------------------------------

struct TokenizerConfig {
  /// Emit each non-word symbol character ("(", "*", "#") as its own token.
  bool code_mode = false;
  std::optional<std::set<std::string, std::less<>>> stopwords;

  friend bool operator==(const TokenizerConfig&, const TokenizerConfig&) = default;
};

using TokenSequence = std::vector<std::string>;

/// Lowercased tokens. Word tokens are maximal runs of letters, digits and
/// underscore; bytes >= 0x80 count as letters so UTF-8 words stay whole.
TokenSequence tokenize(std::string_view text, const TokenizerConfig& config = {});

/// A general English stopword list (function words only).
const std::set<std::string, std::less<>>& english_stopwords();

// --- descriptive statistics ----------------------------------------------

using LabelHistogram = std::array<std::size_t, 6>;

struct CorpusProfile {
  std::string dataset_name;
  std::size_t record_count = 0;
  /// Counts per integer label 0..5, labels rounded half-up.
  LabelHistogram label_histogram{};
  /// Sentence length in tokens -> number of sentences with that length.
  std::map<std::size_t, std::size_t> length_density_s1;
  std::map<std::size_t, std::size_t> length_density_s2;
  /// Frequency descending, then token ascending.
  std::vector<std::pair<std::string, std::size_t>> top_words;
  std::map<std::string, std::size_t, std::less<>> vocab;
  TokenizerConfig tokenizer;
};

/// Label bucket 0..5 for a label in [0, 5] (round half up).
std::size_t label_bucket(double label);

/// `k` must be at least 1 (UsageError otherwise).
CorpusProfile profile(const Dataset& dataset, const TokenizerConfig& config, std::size_t k);

/// Fraction of the first `k` top words shared by two profiles. Throws
/// UsageError when either profile has fewer than `k` top words.
double top_word_overlap(const CorpusProfile& a, const CorpusProfile& b, std::size_t k);

}  // namespace simcmp::corpus
