#include "simcmp/lexical.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "simcmp/error.hpp"
#include "simcmp/transport.hpp"

namespace simcmp::lexical {

double jaccard(const TokenSequence& a, const TokenSequence& b) {
  const std::set<std::string_view> sa(a.begin(), a.end());
  const std::set<std::string_view> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t shared = 0;
  for (auto t : sa) shared += sb.count(t);
  const std::size_t all = sa.size() + sb.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(all);
}

// --- TF-IDF --------------------------------------------------------------

std::size_t TfIdfModel::doc_freq(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? 0 : doc_freq_[it->second];
}

double TfIdfModel::idf(std::string_view token) const {
  const auto df = doc_freq(token);
  if (df == 0) return 0.0;
  return std::log(static_cast<double>(n_docs_) / static_cast<double>(df));
}

TfIdfModel::SparseVector TfIdfModel::vectorize(const TokenSequence& tokens) const {
  SparseVector tf;
  for (const auto& t : tokens) {
    auto it = index_.find(t);
    if (it != index_.end()) tf[it->second] += 1.0;
  }
  for (auto& [dim, weight] : tf) {
    weight *= std::log(static_cast<double>(n_docs_) / static_cast<double>(doc_freq_[dim]));
  }
  return tf;
}

TfIdfModel fit_tfidf_documents(const std::vector<TokenSequence>& documents) {
  TfIdfModel model;
  model.n_docs_ = documents.size();
  for (const auto& doc : documents) {
    const std::set<std::string_view> distinct(doc.begin(), doc.end());
    for (auto token : distinct) {
      auto [it, inserted] = model.index_.try_emplace(std::string(token), model.doc_freq_.size());
      if (inserted) model.doc_freq_.push_back(0);
      ++model.doc_freq_[it->second];
    }
  }
  return model;
}

TfIdfModel fit_tfidf(const corpus::Dataset& dataset, const corpus::TokenizerConfig& config) {
  std::vector<TokenSequence> documents;
  documents.reserve(2 * dataset.size());
  for (const auto& r : dataset.records) {
    documents.push_back(corpus::tokenize(r.sentence1, config));
    documents.push_back(corpus::tokenize(r.sentence2, config));
  }
  return fit_tfidf_documents(documents);
}

double tfidf_cosine(const TfIdfModel& model, const TokenSequence& a, const TokenSequence& b) {
  const auto va = model.vectorize(a);
  const auto vb = model.vectorize(b);
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (const auto& [dim, w] : va) {
    na += w * w;
    auto it = vb.find(dim);
    if (it != vb.end()) dot += w * it->second;
  }
  for (const auto& [dim, w] : vb) nb += w * w;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

// --- word vectors ----------------------------------------------------------

WordVectorStore::WordVectorStore(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw FormatError("word vector dimension must be positive");
}

bool WordVectorStore::contains(std::string_view token) const {
  return vectors_.find(token) != vectors_.end();
}

const std::vector<double>* WordVectorStore::find(std::string_view token) const {
  auto it = vectors_.find(token);
  return it == vectors_.end() ? nullptr : &it->second;
}

void WordVectorStore::set(std::string token, std::vector<double> vector) {
  if (vector.size() != dim_) {
    throw FormatError("vector for '" + token + "' has " + std::to_string(vector.size()) +
                      " components, expected " + std::to_string(dim_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw FormatError("vector for '" + token + "' is not finite");
  }
  vectors_.insert_or_assign(std::move(token), std::move(vector));
}

WordVectorStore WordVectorStore::scaled(double factor) const {
  WordVectorStore out(dim_);
  for (const auto& [token, vec] : vectors_) {
    std::vector<double> v(vec);
    for (auto& x : v) x *= factor;
    out.vectors_.emplace(token, std::move(v));
  }
  return out;
}

namespace {

std::vector<std::string_view> split_blank(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) parts.push_back(line.substr(i, j - i));
    i = j;
  }
  return parts;
}

template <typename T>
bool parse_number(std::string_view text, T& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

WordVectorStore load_word_vectors(const std::filesystem::path& path, const WarningSink& warn) {
  const std::string source = path.string();
  std::ifstream in(path);
  if (!in) throw IoError("cannot open word vector file '" + source + "'");
  auto report = [&](const std::string& msg) {
    if (warn) {
      warn(msg);
    } else {
      std::cerr << "warning: " << msg << '\n';
    }
  };
  auto fail = [&](std::size_t line_no, const std::string& msg) -> FormatError {
    return FormatError(source + ":" + std::to_string(line_no) + ": " + msg);
  };

  std::string line;
  std::size_t line_no = 0;
  std::size_t declared_count = 0;
  std::size_t dim = 0;
  bool have_header = false;
  while (!have_header && std::getline(in, line)) {
    ++line_no;
    const auto parts = split_blank(line);
    if (parts.empty()) continue;
    if (parts.size() != 2 || !parse_number(parts[0], declared_count) ||
        !parse_number(parts[1], dim) || dim == 0) {
      throw fail(line_no, "expected header '<count> <dim>' with a positive dim");
    }
    have_header = true;
  }
  if (!have_header) throw fail(line_no, "missing header line");

  WordVectorStore store(dim);
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto parts = split_blank(line);
    if (parts.empty()) continue;
    ++rows;
    if (parts.size() != dim + 1) {
      throw fail(line_no, "expected a token and " + std::to_string(dim) + " values, found " +
                              std::to_string(parts.size() - 1) + " values");
    }
    std::vector<double> values(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_number(parts[k + 1], values[k]) || !std::isfinite(values[k])) {
        throw fail(line_no, "value '" + std::string(parts[k + 1]) + "' is not a finite number");
      }
    }
    std::string token(parts[0]);
    if (store.contains(token)) {
      report(source + ":" + std::to_string(line_no) + ": duplicate token '" + token +
             "', keeping the last occurrence");
    }
    store.set(std::move(token), std::move(values));
  }
  if (rows != declared_count) {
    throw fail(line_no, "header declares " + std::to_string(declared_count) + " rows, found " +
                            std::to_string(rows));
  }
  return store;
}

// --- WMD -------------------------------------------------------------------

std::optional<NBowDistribution> nbow(const TokenSequence& tokens, const WordVectorStore& store) {
  std::map<std::string, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& t : tokens) {
    if (!store.contains(t)) continue;
    ++counts[t];
    ++total;
  }
  if (total == 0) return std::nullopt;
  NBowDistribution out;
  out.tokens.reserve(counts.size());
  out.weights.reserve(counts.size());
  for (auto& [token, count] : counts) {
    out.tokens.push_back(token);
    out.weights.push_back(static_cast<double>(count) / static_cast<double>(total));
  }
  return out;
}

namespace {

const std::vector<double>& vector_of(const WordVectorStore& store, std::string_view token) {
  const auto* v = store.find(token);
  if (v == nullptr) {
    throw ConfigError("token '" + std::string(token) + "' has no vector in the store");
  }
  if (v->size() != store.dim()) {
    throw ConfigError("vector dimension mismatch for token '" + std::string(token) + "'");
  }
  return *v;
}

double distance(const std::vector<double>& a, const std::vector<double>& b, GroundCost kind) {
  double sq = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    sq += diff * diff;
  }
  return kind == GroundCost::kSquaredEuclidean ? sq : std::sqrt(sq);
}

transport::CostMatrix cost_matrix(const NBowDistribution& p, const NBowDistribution& q,
                                  const WordVectorStore& store, GroundCost kind) {
  if (p.tokens.empty() || q.tokens.empty()) {
    throw UsageError("word mover's distance needs non-empty distributions");
  }
  std::vector<const std::vector<double>*> qv;
  qv.reserve(q.tokens.size());
  for (const auto& t : q.tokens) qv.push_back(&vector_of(store, t));
  transport::CostMatrix cost(p.tokens.size(), q.tokens.size());
  for (std::size_t i = 0; i < p.tokens.size(); ++i) {
    const auto& pi = vector_of(store, p.tokens[i]);
    for (std::size_t j = 0; j < q.tokens.size(); ++j) cost(i, j) = distance(pi, *qv[j], kind);
  }
  return cost;
}

}  // namespace

double ground_cost(const WordVectorStore& store, std::string_view a, std::string_view b,
                   GroundCost kind) {
  return distance(vector_of(store, a), vector_of(store, b), kind);
}

double emd(const NBowDistribution& p, const NBowDistribution& q, const WordVectorStore& store,
           GroundCost kind) {
  const auto cost = cost_matrix(p, q, store, kind);
  return transport::solve_transport(p.weights, q.weights, cost).cost;
}

double rwmd(const NBowDistribution& p, const NBowDistribution& q, const WordVectorStore& store,
            GroundCost kind) {
  const auto cost = cost_matrix(p, q, store, kind);
  double forward = 0.0;
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    double nearest = cost(i, 0);
    for (std::size_t j = 1; j < cost.cols(); ++j) nearest = std::min(nearest, cost(i, j));
    forward += p.weights[i] * nearest;
  }
  double backward = 0.0;
  for (std::size_t j = 0; j < cost.cols(); ++j) {
    double nearest = cost(0, j);
    for (std::size_t i = 1; i < cost.rows(); ++i) nearest = std::min(nearest, cost(i, j));
    backward += q.weights[j] * nearest;
  }
  return std::max(forward, backward);
}

// --- dataset scoring -------------------------------------------------------

std::optional<LexicalMetric> parse_lexical_metric(std::string_view name) {
  if (name == "jaccard") return LexicalMetric::kJaccard;
  if (name == "tfidf") return LexicalMetric::kTfIdf;
  if (name == "negwmd") return LexicalMetric::kNegWmd;
  return std::nullopt;
}

std::string_view metric_name(LexicalMetric metric) {
  switch (metric) {
    case LexicalMetric::kJaccard: return "jaccard";
    case LexicalMetric::kTfIdf: return "tfidf";
    case LexicalMetric::kNegWmd: return "negwmd";
  }
  return "?";
}

ScoreVector score_dataset_lexical(const corpus::Dataset& dataset, LexicalMetric metric,
                                  const LexicalOptions& options, const WordVectorStore* store) {
  if (metric == LexicalMetric::kNegWmd && store == nullptr) {
    throw ConfigError("negwmd needs a word vector store");
  }
  ScoreVector out;
  out.dataset_name = dataset.name;
  out.metric_name = std::string(metric_name(metric));
  out.scored.reserve(dataset.size());

  std::optional<TfIdfModel> model;
  if (metric == LexicalMetric::kTfIdf) model = fit_tfidf(dataset, options.tokenizer);

  for (const auto& record : dataset.records) {
    const auto a = corpus::tokenize(record.sentence1, options.tokenizer);
    const auto b = corpus::tokenize(record.sentence2, options.tokenizer);
    switch (metric) {
      case LexicalMetric::kJaccard:
        out.scored.push_back({record.id, jaccard(a, b)});
        break;
      case LexicalMetric::kTfIdf:
        out.scored.push_back({record.id, tfidf_cosine(*model, a, b)});
        break;
      case LexicalMetric::kNegWmd: {
        const auto p = nbow(a, *store);
        const auto q = nbow(b, *store);
        if (!p || !q) {
          out.skipped.push_back(record.id);
          break;
        }
        out.scored.push_back({record.id, 0.0 - emd(*p, *q, *store, options.ground_cost)});
        break;
      }
    }
  }
  return out;
}

}  // namespace simcmp::lexical
