#include "simcmp/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "csv.hpp"
#include "simcmp/error.hpp"

namespace simcmp::corpus {

namespace {

using detail::trim;

constexpr std::string_view kRequiredColumns[] = {"id", "sentence1", "sentence2", "score"};

struct RawRow {
  std::size_t row = 0;
  std::string id;
  std::string sentence1;
  std::string sentence2;
  std::optional<double> label;
  std::string label_text;
};

// Applies the record invariants and returns the failure reason, if any.
std::optional<std::string> check_row(const RawRow& raw,
                                     const std::unordered_set<std::string>& seen_ids) {
  if (raw.id.empty()) return "empty id";
  if (trim(raw.sentence1).empty()) return "sentence1 is empty";
  if (trim(raw.sentence2).empty()) return "sentence2 is empty";
  if (!raw.label) return "score '" + raw.label_text + "' is not a number";
  if (!std::isfinite(*raw.label) || *raw.label < 0.0 || *raw.label > 5.0) {
    return "score " + raw.label_text + " outside [0, 5]";
  }
  if (seen_ids.count(raw.id) != 0) return "duplicate id '" + raw.id + "'";
  return std::nullopt;
}

LoadResult validate(std::string name, std::vector<RawRow> raws, bool strict,
                    const std::string& source) {
  LoadResult result;
  result.dataset.name = std::move(name);
  std::unordered_set<std::string> seen;
  for (auto& raw : raws) {
    if (auto reason = check_row(raw, seen)) {
      const std::string message =
          source + ": row " + std::to_string(raw.row) + ": " + *reason;
      if (strict) throw ValidationError(raw.row, message);
      result.rejected.push_back({raw.row, *reason});
      continue;
    }
    seen.insert(raw.id);
    result.dataset.records.push_back({raw.id, std::string(trim(raw.sentence1)),
                                      std::string(trim(raw.sentence2)), *raw.label});
  }
  if (result.dataset.records.size() < 2) {
    throw TooSmallError(source + ": " + std::to_string(result.dataset.records.size()) +
                        " valid row(s) after rejecting " +
                        std::to_string(result.rejected.size()) + "; at least 2 required");
  }
  return result;
}

std::vector<RawRow> read_delimited(const std::string& text, char delimiter,
                                   const std::string& source) {
  auto rows = detail::parse_delimited(text, delimiter);
  if (rows.empty()) throw SchemaError(source + ": missing header row");

  const auto& header = rows.front().fields;
  std::array<std::size_t, 4> column{};
  for (std::size_t c = 0; c < 4; ++c) {
    auto it = std::find_if(header.begin(), header.end(), [&](const std::string& h) {
      return trim(h) == kRequiredColumns[c];
    });
    if (it == header.end()) {
      throw SchemaError(source + ": missing column '" + std::string(kRequiredColumns[c]) + "'");
    }
    column[c] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<RawRow> raws;
  raws.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& fields = rows[r].fields;
    RawRow raw;
    raw.row = r;
    if (fields.size() != header.size()) {
      // Arity mismatch: record it as a row that cannot be validated.
      raw.label_text = "<" + std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()) + ">";
      raw.id = fields.empty() ? std::string() : std::string(trim(fields[0]));
      raw.sentence1 = raw.sentence2 = "";
      raws.push_back(std::move(raw));
      continue;
    }
    raw.id = std::string(trim(fields[column[0]]));
    raw.sentence1 = fields[column[1]];
    raw.sentence2 = fields[column[2]];
    raw.label_text = std::string(trim(fields[column[3]]));
    double value = 0.0;
    if (detail::parse_double(raw.label_text, value)) raw.label = value;
    raws.push_back(std::move(raw));
  }
  return raws;
}

std::vector<RawRow> read_jsonl(const std::string& text, const std::string& source) {
  std::vector<RawRow> raws;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    ++row;
    RawRow raw;
    raw.row = row;
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      raw.label_text = "<invalid JSON>";
      raws.push_back(std::move(raw));
      continue;
    }
    if (!object.is_object()) {
      raw.label_text = "<not an object>";
      raws.push_back(std::move(raw));
      continue;
    }
    for (auto key : kRequiredColumns) {
      if (!object.contains(key)) {
        throw SchemaError(source + ": row " + std::to_string(row) + ": missing key '" +
                          std::string(key) + "'");
      }
    }
    const auto& id = object["id"];
    const auto& s1 = object["sentence1"];
    const auto& s2 = object["sentence2"];
    const auto& score = object["score"];
    if (id.is_string()) raw.id = std::string(trim(id.get<std::string>()));
    if (s1.is_string()) raw.sentence1 = s1.get<std::string>();
    if (s2.is_string()) raw.sentence2 = s2.get<std::string>();
    raw.label_text = score.dump();
    if (score.is_number()) raw.label = score.get<double>();
    raws.push_back(std::move(raw));
  }
  return raws;
}

bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c == '_' || c >= 0x80;
}

}  // namespace

const PairRecord* Dataset::find(std::string_view id) const {
  auto it = std::find_if(records.begin(), records.end(),
                         [&](const PairRecord& r) { return r.id == id; });
  return it == records.end() ? nullptr : &*it;
}

FileFormat parse_format(std::string_view name) {
  if (name == "csv") return FileFormat::kCsv;
  if (name == "tsv") return FileFormat::kTsv;
  if (name == "jsonl") return FileFormat::kJsonl;
  throw UsageError("unknown dataset format '" + std::string(name) +
                   "' (expected csv, tsv or jsonl)");
}

FileFormat format_from_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".csv") return FileFormat::kCsv;
  if (ext == ".tsv") return FileFormat::kTsv;
  if (ext == ".jsonl" || ext == ".ndjson") return FileFormat::kJsonl;
  throw UsageError("cannot infer dataset format from '" + path.string() +
                   "'; pass the format explicitly");
}

std::string_view format_name(FileFormat format) {
  switch (format) {
    case FileFormat::kCsv: return "csv";
    case FileFormat::kTsv: return "tsv";
    case FileFormat::kJsonl: return "jsonl";
  }
  return "?";
}

LoadResult load_dataset(const std::filesystem::path& path, FileFormat format,
                        const LoadOptions& options) {
  const std::string source = path.string();
  const std::string text = detail::read_file(source);
  std::vector<RawRow> raws;
  switch (format) {
    case FileFormat::kCsv: raws = read_delimited(text, ',', source); break;
    case FileFormat::kTsv: raws = read_delimited(text, '\t', source); break;
    case FileFormat::kJsonl: raws = read_jsonl(text, source); break;
  }
  std::string name = options.name.empty() ? path.stem().string() : options.name;
  return validate(std::move(name), std::move(raws), options.strict, source);
}

Dataset make_dataset(std::string name, std::vector<PairRecord> records) {
  std::vector<RawRow> raws;
  raws.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto& r = records[i];
    raws.push_back({i + 1, std::move(r.id), std::move(r.sentence1), std::move(r.sentence2),
                    r.label, std::to_string(r.label)});
  }
  const std::string source = name;
  return validate(std::move(name), std::move(raws), /*strict=*/true, source).dataset;
}

TokenSequence tokenize(std::string_view text, const TokenizerConfig& config) {
  TokenSequence tokens;
  auto emit = [&](std::string token) {
    if (config.stopwords && config.stopwords->count(token) != 0) return;
    tokens.push_back(std::move(token));
  };
  std::size_t i = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (is_word_byte(c)) {
      std::string word;
      while (i < text.size() && is_word_byte(static_cast<unsigned char>(text[i]))) {
        word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
        ++i;
      }
      emit(std::move(word));
      continue;
    }
    if (config.code_mode && std::isspace(c) == 0) emit(std::string(1, static_cast<char>(c)));
    ++i;
  }
  return tokens;
}

const std::set<std::string, std::less<>>& english_stopwords() {
  static const std::set<std::string, std::less<>> words = {
      "a", "about", "above", "after", "again", "against", "all", "am", "an", "and",
      "any", "are", "aren", "as", "at", "be", "because", "been", "before", "being",
      "below", "between", "both", "but", "by", "can", "couldn", "d", "did", "didn",
      "do", "does", "doesn", "doing", "don", "down", "during", "each", "few", "for",
      "from", "further", "had", "hadn", "has", "hasn", "have", "haven", "having", "he",
      "her", "here", "hers", "herself", "him", "himself", "his", "how", "i", "if",
      "in", "into", "is", "isn", "it", "its", "itself", "just", "ll", "m",
      "ma", "me", "mightn", "more", "most", "mustn", "my", "myself", "needn", "no",
      "nor", "not", "now", "o", "of", "off", "on", "once", "only", "or",
      "other", "our", "ours", "ourselves", "out", "over", "own", "re", "s", "same",
      "shan", "she", "should", "shouldn", "so", "some", "such", "t", "than", "that",
      "the", "their", "theirs", "them", "themselves", "then", "there", "these", "they", "this",
      "those", "through", "to", "too", "under", "until", "up", "ve", "very", "was",
      "wasn", "we", "were", "weren", "what", "when", "where", "which", "while", "who",
      "whom", "why", "will", "with", "won", "wouldn", "y", "you", "your", "yours",
      "yourself", "yourselves"};
  return words;
}

std::size_t label_bucket(double label) {
  const double clamped = std::clamp(label, 0.0, 5.0);
  return static_cast<std::size_t>(std::floor(clamped + 0.5));
}

CorpusProfile profile(const Dataset& dataset, const TokenizerConfig& config, std::size_t k) {
  if (k < 1) throw UsageError("top-k must be at least 1");
  CorpusProfile out;
  out.dataset_name = dataset.name;
  out.record_count = dataset.size();
  out.tokenizer = config;
  for (const auto& record : dataset.records) {
    ++out.label_histogram[label_bucket(record.label)];
    const auto t1 = tokenize(record.sentence1, config);
    const auto t2 = tokenize(record.sentence2, config);
    ++out.length_density_s1[t1.size()];
    ++out.length_density_s2[t2.size()];
    for (const auto& t : t1) ++out.vocab[t];
    for (const auto& t : t2) ++out.vocab[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(out.vocab.begin(), out.vocab.end());
  const auto n = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(n), ranked.end(),
                    [](const auto& a, const auto& b) {
                      if (a.second != b.second) return a.second > b.second;
                      return a.first < b.first;
                    });
  ranked.resize(n);
  out.top_words = std::move(ranked);
  return out;
}

double top_word_overlap(const CorpusProfile& a, const CorpusProfile& b, std::size_t k) {
  if (k < 1) throw UsageError("k must be at least 1");
  if (!(a.tokenizer == b.tokenizer)) {
    throw UsageError("profiles were computed with different tokenizer settings");
  }
  for (const auto* p : {&a, &b}) {
    if (p->top_words.size() < k) {
      throw UsageError("profile of '" + p->dataset_name + "' holds " +
                       std::to_string(p->top_words.size()) + " top words but k = " +
                       std::to_string(k) + "; re-profile with a larger k");
    }
  }
  std::set<std::string_view> top_a;
  for (std::size_t i = 0; i < k; ++i) top_a.insert(a.top_words[i].first);
  std::size_t shared = 0;
  for (std::size_t i = 0; i < k; ++i) shared += top_a.count(b.top_words[i].first);
  return static_cast<double>(shared) / static_cast<double>(k);
}

}  // namespace simcmp::corpus
