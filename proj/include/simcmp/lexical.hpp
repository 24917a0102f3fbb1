#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simcmp/corpus.hpp"
#include "simcmp/score_vector.hpp"

namespace simcmp::lexical {

using corpus::TokenSequence;

/// |set(a) ∩ set(b)| / |set(a) ∪ set(b)|; two empty sequences give 1.
double jaccard(const TokenSequence& a, const TokenSequence& b);

// --- TF-IDF --------------------------------------------------------------

/// Document frequencies over one dataset, where every sentence of either
/// column is a document. Term weights are tf * ln(N / df).
class TfIdfModel {
 public:
  using SparseVector = std::map<std::size_t, double>;

  std::size_t n_docs() const noexcept { return n_docs_; }
  std::size_t vocab_size() const noexcept { return doc_freq_.size(); }
  /// Document frequency of `token`, 0 if unseen.
  std::size_t doc_freq(std::string_view token) const;
  double idf(std::string_view token) const;

  /// Weighted vector of a sentence; tokens unseen during fitting are ignored.
  SparseVector vectorize(const TokenSequence& tokens) const;

  friend TfIdfModel fit_tfidf(const corpus::Dataset&, const corpus::TokenizerConfig&);
  friend TfIdfModel fit_tfidf_documents(const std::vector<TokenSequence>&);

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::size_t> doc_freq_;
  std::size_t n_docs_ = 0;
};

TfIdfModel fit_tfidf(const corpus::Dataset& dataset, const corpus::TokenizerConfig& config);
/// Fits over an explicit document list.
TfIdfModel fit_tfidf_documents(const std::vector<TokenSequence>& documents);

/// Cosine of the TF-IDF vectors of `a` and `b`; 0 when either has zero norm.
double tfidf_cosine(const TfIdfModel& model, const TokenSequence& a, const TokenSequence& b);

// --- word vectors and WMD ------------------------------------------------

class WordVectorStore {
 public:
  explicit WordVectorStore(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return vectors_.size(); }
  bool contains(std::string_view token) const;
  /// nullptr when absent.
  const std::vector<double>* find(std::string_view token) const;

  /// Inserts or replaces. Throws FormatError on wrong arity or non-finite values.
  void set(std::string token, std::vector<double> vector);

  /// Copy with every vector multiplied by `factor`.
  WordVectorStore scaled(double factor) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::size_t dim_;
  std::unordered_map<std::string, std::vector<double>, Hash, std::equal_to<>> vectors_;
};

using WarningSink = std::function<void(const std::string&)>;

/// Reads the text layout "<count> <dim>" followed by "<token> v1 .. vdim" rows.
/// Duplicate tokens keep the last row and report through `warn` (stderr when
/// empty). Arity mismatches and non-finite values raise FormatError naming the line.
WordVectorStore load_word_vectors(const std::filesystem::path& path, const WarningSink& warn = {});

/// Normalized bag of words: distinct in-vocabulary tokens (sorted) with
/// count-proportional weights summing to 1.
struct NBowDistribution {
  std::vector<std::string> tokens;
  std::vector<double> weights;
};

/// nullopt when no token of `tokens` is in the store; the caller skips the record.
std::optional<NBowDistribution> nbow(const TokenSequence& tokens, const WordVectorStore& store);

enum class GroundCost { kEuclidean, kSquaredEuclidean };

/// Ground cost between two stored tokens. Throws ConfigError if either is absent.
double ground_cost(const WordVectorStore& store, std::string_view a, std::string_view b,
                   GroundCost kind = GroundCost::kEuclidean);

/// Word Mover's Distance: exact optimal transport between the two nBOW
/// distributions under the chosen ground cost.
double emd(const NBowDistribution& p, const NBowDistribution& q, const WordVectorStore& store,
           GroundCost kind = GroundCost::kEuclidean);

/// Relaxed WMD lower bound: the larger of the two one-sided costs where every
/// unit of mass travels to its nearest counterpart.
double rwmd(const NBowDistribution& p, const NBowDistribution& q, const WordVectorStore& store,
            GroundCost kind = GroundCost::kEuclidean);

// --- dataset scoring -----------------------------------------------------

enum class LexicalMetric { kJaccard, kTfIdf, kNegWmd };

/// Parses "jaccard", "tfidf" or "negwmd"; nullopt otherwise.
std::optional<LexicalMetric> parse_lexical_metric(std::string_view name);
std::string_view metric_name(LexicalMetric metric);

struct LexicalOptions {
  corpus::TokenizerConfig tokenizer;
  GroundCost ground_cost = GroundCost::kEuclidean;
};

/// Scores sentence1 against sentence2 for every record. NegWMD is -emd and
/// needs `store` (ConfigError otherwise); records with an empty nBOW on either
/// side land in `skipped`.
ScoreVector score_dataset_lexical(const corpus::Dataset& dataset, LexicalMetric metric,
                                  const LexicalOptions& options,
                                  const WordVectorStore* store = nullptr);

}  // namespace simcmp::lexical
