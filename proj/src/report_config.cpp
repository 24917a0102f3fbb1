#include <set>

#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "csv.hpp"
#include "simcmp/error.hpp"
#include "simcmp/report.hpp"

namespace simcmp::report {

namespace {

using nlohmann::json;

std::string sha256_hex(const std::string& text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void reject_unknown_keys(const json& object, const std::string& where,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& item : object.items()) {
    bool known = false;
    for (auto key : allowed) known = known || item.key() == key;
    if (!known) throw ConfigError(fmt::format("{}: unknown key '{}'", where, item.key()));
  }
}

const json& require(const json& object, const std::string& where, const char* key) {
  if (!object.contains(key)) throw ConfigError(fmt::format("{}.{} is required", where, key));
  return object.at(key);
}

std::string require_string(const json& object, const std::string& where, const char* key) {
  const auto& v = require(object, where, key);
  if (!v.is_string() || v.get<std::string>().empty()) {
    throw ConfigError(fmt::format("{}.{} must be a non-empty string", where, key));
  }
  return v.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::optional<MetricKind> parse_kind(std::string_view kind) {
  if (kind == "jaccard") return MetricKind::kJaccard;
  if (kind == "tfidf") return MetricKind::kTfIdf;
  if (kind == "negwmd") return MetricKind::kNegWmd;
  if (kind == "embedding") return MetricKind::kEmbedding;
  if (kind == "direct") return MetricKind::kDirect;
  return std::nullopt;
}

MetricSpec parse_metric(const json& item, std::size_t index, const std::filesystem::path& base) {
  const std::string where = fmt::format("metrics[{}]", index);
  MetricSpec spec;
  if (item.is_string()) {
    spec.name = item.get<std::string>();
    auto kind = parse_kind(spec.name);
    if (!kind || *kind == MetricKind::kEmbedding || *kind == MetricKind::kDirect) {
      throw ConfigError(fmt::format("{}: '{}' is not a lexical metric; use an object with "
                                    "\"kind\"", where, spec.name));
    }
    spec.kind = *kind;
    return spec;
  }
  if (!item.is_object()) throw ConfigError(where + " must be a string or an object");
  reject_unknown_keys(item, where, {"name", "kind", "vectors", "ground_cost", "files"});
  spec.name = require_string(item, where, "name");
  const std::string kind_text =
      item.contains("kind") ? require_string(item, where, "kind") : spec.name;
  auto kind = parse_kind(kind_text);
  if (!kind) {
    throw ConfigError(fmt::format("{}.kind '{}' is not one of jaccard, tfidf, negwmd, embedding, "
                                  "direct", where, kind_text));
  }
  spec.kind = *kind;
  if (item.contains("vectors")) spec.vectors = resolve(base, require_string(item, where, "vectors"));
  if (item.contains("ground_cost")) {
    const auto cost = require_string(item, where, "ground_cost");
    if (cost == "euclidean") {
      spec.ground_cost = lexical::GroundCost::kEuclidean;
    } else if (cost == "squared_euclidean") {
      spec.ground_cost = lexical::GroundCost::kSquaredEuclidean;
    } else {
      throw ConfigError(where + ".ground_cost must be 'euclidean' or 'squared_euclidean'");
    }
  }
  if (item.contains("files")) {
    const auto& files = item.at("files");
    if (!files.is_object()) throw ConfigError(where + ".files must map dataset names to paths");
    for (const auto& f : files.items()) {
      if (!f.value().is_string()) {
        throw ConfigError(fmt::format("{}.files.{} must be a path string", where, f.key()));
      }
      spec.files[f.key()] = resolve(base, f.value().get<std::string>());
    }
  }
  return spec;
}

corpus::TokenizerConfig parse_tokenizer(const json& item, const std::filesystem::path& base) {
  corpus::TokenizerConfig config;
  if (!item.is_object()) throw ConfigError("tokenizer must be an object");
  reject_unknown_keys(item, "tokenizer", {"code_mode", "stopwords"});
  if (item.contains("code_mode")) {
    if (!item["code_mode"].is_boolean()) throw ConfigError("tokenizer.code_mode must be boolean");
    config.code_mode = item["code_mode"].get<bool>();
  }
  if (item.contains("stopwords") && !item["stopwords"].is_null()) {
    const auto& sw = item["stopwords"];
    if (sw.is_string() && sw.get<std::string>() == "english") {
      config.stopwords = corpus::english_stopwords();
    } else if (sw.is_string()) {
      // A file with one stopword per line.
      const auto text = detail::read_file(resolve(base, sw.get<std::string>()).string());
      std::set<std::string, std::less<>> words;
      std::size_t start = 0;
      while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        auto word = detail::trim(std::string_view(text).substr(start, end - start));
        if (!word.empty()) words.emplace(word);
        start = end + 1;
      }
      config.stopwords = std::move(words);
    } else if (sw.is_array()) {
      std::set<std::string, std::less<>> words;
      for (const auto& w : sw) {
        if (!w.is_string()) throw ConfigError("tokenizer.stopwords entries must be strings");
        words.insert(w.get<std::string>());
      }
      config.stopwords = std::move(words);
    } else {
      throw ConfigError("tokenizer.stopwords must be \"english\", a file path or a list");
    }
  }
  return config;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown_keys(doc, "config",
                      {"datasets", "metrics", "tokenizer", "top_k", "seed", "output_dir", "emit"});

  RunConfig config;
  // Where results land does not change the analysis.
  json hashed = doc;
  hashed.erase("output_dir");
  config.config_hash = sha256_hex(hashed.dump());

  const auto& datasets = require(doc, "config", "datasets");
  if (!datasets.is_array()) throw ConfigError("datasets must be a list");
  for (std::size_t i = 0; i < datasets.size(); ++i) {
    const std::string where = fmt::format("datasets[{}]", i);
    const auto& item = datasets[i];
    if (!item.is_object()) throw ConfigError(where + " must be an object");
    reject_unknown_keys(item, where, {"name", "path", "format"});
    DatasetSpec spec;
    spec.path = resolve(base_dir, require_string(item, where, "path"));
    spec.name = item.contains("name") ? require_string(item, where, "name")
                                      : spec.path.stem().string();
    try {
      spec.format = item.contains("format")
                        ? corpus::parse_format(require_string(item, where, "format"))
                        : corpus::format_from_extension(spec.path);
    } catch (const UsageError& e) {
      throw ConfigError(where + ".format: " + e.what());
    }
    config.datasets.push_back(std::move(spec));
  }

  const auto& metrics = require(doc, "config", "metrics");
  if (!metrics.is_array()) throw ConfigError("metrics must be a list");
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    config.metrics.push_back(parse_metric(metrics[i], i, base_dir));
  }

  if (doc.contains("tokenizer")) config.tokenizer = parse_tokenizer(doc["tokenizer"], base_dir);
  if (doc.contains("top_k")) {
    if (!doc["top_k"].is_number_unsigned() || doc["top_k"].get<std::size_t>() < 1) {
      throw ConfigError("top_k must be a positive integer");
    }
    config.top_k = doc["top_k"].get<std::size_t>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a nonnegative integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  config.output_dir = resolve(base_dir, doc.contains("output_dir")
                                            ? require_string(doc, "config", "output_dir")
                                            : std::string("report"));
  if (doc.contains("emit")) {
    const auto& emit = doc["emit"];
    if (!emit.is_object()) throw ConfigError("emit must be an object");
    reject_unknown_keys(emit, "emit", {"json", "csv", "svg", "markdown"});
    auto flag = [&](const char* key, bool& out) {
      if (!emit.contains(key)) return;
      if (!emit[key].is_boolean()) throw ConfigError(fmt::format("emit.{} must be boolean", key));
      out = emit[key].get<bool>();
    };
    flag("json", config.emit.json);
    flag("csv", config.emit.csv);
    flag("svg", config.emit.svg);
    flag("markdown", config.emit.markdown);
  }
  validate(config);
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = detail::read_file(path.string());
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text, path.parent_path());
}

void validate(const RunConfig& config) {
  if (config.datasets.size() < 2) throw ConfigError("datasets: at least 2 datasets are required");
  if (config.metrics.empty()) throw ConfigError("metrics: at least 1 metric is required");
  std::set<std::string> names;
  for (std::size_t i = 0; i < config.datasets.size(); ++i) {
    if (!names.insert(config.datasets[i].name).second) {
      throw ConfigError(fmt::format("datasets[{}].name '{}' is not unique", i,
                                    config.datasets[i].name));
    }
  }
  std::set<std::string> metric_names;
  for (std::size_t i = 0; i < config.metrics.size(); ++i) {
    const auto& m = config.metrics[i];
    if (!metric_names.insert(m.name).second) {
      throw ConfigError(fmt::format("metrics[{}].name '{}' is not unique", i, m.name));
    }
    if (m.kind == MetricKind::kNegWmd && m.vectors.empty()) {
      throw ConfigError(fmt::format("metrics[{}].vectors is required for negwmd metric '{}'", i,
                                    m.name));
    }
    if (m.kind == MetricKind::kEmbedding || m.kind == MetricKind::kDirect) {
      for (const auto& d : config.datasets) {
        if (m.files.count(d.name) == 0) {
          throw ConfigError(fmt::format("metrics[{}].files.{} is required for metric '{}'", i,
                                        d.name, m.name));
        }
      }
    }
  }
}

}  // namespace simcmp::report
