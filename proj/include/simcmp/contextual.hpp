#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "simcmp/corpus.hpp"
#include "simcmp/score_vector.hpp"

namespace simcmp::contextual {

/// Sentence embeddings from one encoder, keyed by record id.
///
/// Backed by the CEMB1 exchange file:
///
///   "CEMB1\n"
///   {"provider": <text>, "dim": <int>, "count": <int>}\n
///   count x { u16le id_len, id bytes, dim x f32le (sentence 1), dim x f32le (sentence 2) }
class EmbeddingStore {
 public:
  struct Entry {
    std::string id;
    std::vector<float> first;
    std::vector<float> second;
  };

  EmbeddingStore(std::string provider, std::size_t dim);

  const std::string& provider() const noexcept { return provider_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }
  /// File order.
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  const Entry* find(std::string_view id) const;

  /// Throws FormatError on a duplicate id, wrong arity or a non-finite value.
  void add(std::string id, std::vector<float> first, std::vector<float> second);

 private:
  std::string provider_;
  std::size_t dim_;
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

EmbeddingStore load_embeddings(const std::filesystem::path& path);
/// Canonical CEMB1 encoding of `store` (entries in stored order).
std::string encode_embeddings(const EmbeddingStore& store);
EmbeddingStore decode_embeddings(std::string_view bytes, const std::string& source = "<memory>");
void write_embeddings(const EmbeddingStore& store, const std::filesystem::path& path);

/// Pair scores emitted directly by a cross-encoder.
///
/// File layout: a "# provider=<name>" first line, an "id,score" header, then rows.
class DirectScoreStore {
 public:
  explicit DirectScoreStore(std::string provider);

  const std::string& provider() const noexcept { return provider_; }
  std::size_t size() const noexcept { return order_.size(); }
  /// nullptr when absent.
  const double* find(std::string_view id) const;
  /// Throws FormatError on a duplicate id or non-finite score.
  void add(std::string id, double score);
  const std::vector<std::string>& ids() const noexcept { return order_; }

 private:
  std::string provider_;
  std::unordered_map<std::string, double> scores_;
  std::vector<std::string> order_;
};

DirectScoreStore load_direct_scores(const std::filesystem::path& path);
void write_direct_scores(const DirectScoreStore& store, const std::filesystem::path& path);

/// u.v / (|u| |v|); 0 when either norm is zero. Throws DimensionError on size mismatch.
double cosine(std::span<const double> u, std::span<const double> v);
double cosine(std::span<const float> u, std::span<const float> v);

/// Cosine of each record's two embeddings, in dataset order. Records missing
/// from the store are skipped; CoverageError when fewer than half are present.
ScoreVector score_dataset_contextual(const corpus::Dataset& dataset, const EmbeddingStore& store);
ScoreVector score_dataset_contextual(const corpus::Dataset& dataset,
                                     const DirectScoreStore& store);

}  // namespace simcmp::contextual
