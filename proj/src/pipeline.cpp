#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <numeric>

#include <fmt/format.h>

#include "simcmp/contextual.hpp"
#include "simcmp/error.hpp"
#include "simcmp/report.hpp"
#include "simcmp/version.hpp"

namespace simcmp::report {

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buffer;
}

// Shared inputs of one metric, loaded once for all datasets.
struct MetricResources {
  std::optional<lexical::WordVectorStore> vectors;
  std::string error;
};

MetricResources load_resources(const MetricSpec& spec, std::vector<std::string>& warnings) {
  MetricResources res;
  if (spec.kind != MetricKind::kNegWmd) return res;
  try {
    res.vectors = lexical::load_word_vectors(
        spec.vectors, [&](const std::string& msg) { warnings.push_back(msg); });
  } catch (const Error& e) {
    res.error = e.what();
  }
  return res;
}

ScoreVector score_one(const corpus::Dataset& dataset, const MetricSpec& spec,
                      const MetricResources& res, const corpus::TokenizerConfig& tokenizer,
                      std::string& provider) {
  lexical::LexicalOptions options{tokenizer, spec.ground_cost};
  ScoreVector scores;
  switch (spec.kind) {
    case MetricKind::kJaccard:
      scores = lexical::score_dataset_lexical(dataset, lexical::LexicalMetric::kJaccard, options);
      break;
    case MetricKind::kTfIdf:
      scores = lexical::score_dataset_lexical(dataset, lexical::LexicalMetric::kTfIdf, options);
      break;
    case MetricKind::kNegWmd:
      if (!res.vectors) throw ConfigError("word vectors unavailable: " + res.error);
      scores = lexical::score_dataset_lexical(dataset, lexical::LexicalMetric::kNegWmd, options,
                                              &*res.vectors);
      break;
    case MetricKind::kEmbedding: {
      const auto store = contextual::load_embeddings(spec.files.at(dataset.name));
      scores = contextual::score_dataset_contextual(dataset, store);
      break;
    }
    case MetricKind::kDirect: {
      const auto store = contextual::load_direct_scores(spec.files.at(dataset.name));
      scores = contextual::score_dataset_contextual(dataset, store);
      break;
    }
  }
  provider = scores.metric_name;
  return scores;
}

}  // namespace

std::vector<PairKey> dataset_pairs(const std::vector<std::string>& names) {
  std::vector<PairKey> pairs;
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = i + 1; j < names.size(); ++j) pairs.push_back({names[i], names[j]});
  }
  return pairs;
}

Grid ComparisonReport::p_matrix() const {
  Grid grid(cells.size());
  for (std::size_t m = 0; m < cells.size(); ++m) {
    for (const auto& cell : cells[m]) {
      grid[m].push_back(cell.ok() ? std::optional(cell.comparison->ttest.p_two_tailed)
                                  : std::nullopt);
    }
  }
  return grid;
}

Grid ComparisonReport::d_matrix() const {
  Grid grid(cells.size());
  for (std::size_t m = 0; m < cells.size(); ++m) {
    for (const auto& cell : cells[m]) {
      grid[m].push_back(cell.ok() ? std::optional(cell.comparison->effect.d) : std::nullopt);
    }
  }
  return grid;
}

std::size_t ComparisonReport::failed_cells() const {
  std::size_t failed = 0;
  for (const auto& row : cells) {
    for (const auto& cell : row) failed += cell.ok() ? 0 : 1;
  }
  return failed;
}

const ScoreEntry* ComparisonReport::score(const std::string& dataset,
                                          const std::string& metric) const {
  for (const auto& s : scores) {
    if (s.dataset == dataset && s.metric == metric) return &s;
  }
  return nullptr;
}

ComparisonReport run_pipeline(const RunConfig& config) {
  validate(config);
  ComparisonReport report;
  report.provenance = {config.config_hash, config.seed, std::string(kVersion), utc_timestamp()};

  // Load and profile.
  std::map<std::string, const corpus::Dataset*> by_name;
  report.loaded.reserve(config.datasets.size());
  for (const auto& spec : config.datasets) {
    report.dataset_names.push_back(spec.name);
    DatasetStatus status;
    status.name = spec.name;
    try {
      corpus::LoadOptions options;
      options.name = spec.name;
      auto loaded = corpus::load_dataset(spec.path, spec.format, options);
      status.records = loaded.dataset.size();
      status.rejected = std::move(loaded.rejected);
      for (const auto& rej : status.rejected) {
        report.warnings.push_back(
            fmt::format("{}: rejected row {}: {}", spec.name, rej.row, rej.reason));
      }
      report.loaded.push_back(std::move(loaded.dataset));
    } catch (const Error& e) {
      status.error = e.what();
      report.warnings.push_back(fmt::format("dataset '{}' failed to load: {}", spec.name,
                                            e.what()));
    }
    report.datasets.push_back(std::move(status));
  }
  for (const auto& d : report.loaded) {
    by_name[d.name] = &d;
    report.profiles.push_back(corpus::profile(d, config.tokenizer, config.top_k));
  }

  // Score every (metric, dataset).
  for (const auto& spec : config.metrics) {
    report.metric_names.push_back(spec.name);
    const auto resources = load_resources(spec, report.warnings);
    for (const auto& name : report.dataset_names) {
      ScoreEntry entry;
      entry.dataset = name;
      entry.metric = spec.name;
      auto it = by_name.find(name);
      if (it == by_name.end()) {
        entry.error = "dataset not loaded";
      } else {
        try {
          auto scores = score_one(*it->second, spec, resources, config.tokenizer, entry.provider);
          scores.metric_name = spec.name;
          const auto values = scores.values();
          entry.summary = stats::summarize(values);
          entry.skipped = scores.skipped.size();
          entry.correlation = stats::label_score_correlation(*it->second, scores);
          entry.scores = std::move(scores);
        } catch (const Error& e) {
          entry.error = e.what();
        }
      }
      if (!entry.error.empty()) {
        report.warnings.push_back(
            fmt::format("scoring ({}, {}) failed: {}", name, spec.name, entry.error));
      }
      report.scores.push_back(std::move(entry));
    }
  }

  // Compare every (metric, pair).
  report.pairs = dataset_pairs(report.dataset_names);
  for (const auto& metric : report.metric_names) {
    std::vector<Cell> row;
    for (const auto& pair : report.pairs) {
      Cell cell;
      const auto* a = report.score(pair.a, metric);
      const auto* b = report.score(pair.b, metric);
      if (!a->ok() || !b->ok()) {
        cell.error = fmt::format("scores unavailable for {}",
                                 !a->ok() ? pair.a : pair.b);
      } else if (a->provider != b->provider) {
        cell.error = fmt::format("provider mismatch: '{}' vs '{}'", a->provider, b->provider);
      } else {
        try {
          cell.comparison = stats::compare_pair(*a->scores, *b->scores, config.seed);
        } catch (const Error& e) {
          cell.error = e.what();
        }
      }
      if (!cell.ok()) {
        report.warnings.push_back(
            fmt::format("comparison ({}, {}) failed: {}", metric, pair.label(), cell.error));
      }
      row.push_back(std::move(cell));
    }
    report.cells.push_back(std::move(row));
  }

  report.verdict = rank_transferability(report);
  return report;
}

std::vector<RankedPair> rank_transferability(const std::vector<PairKey>& pairs,
                                             const Grid& d_matrix, const Grid& p_matrix) {
  std::vector<RankedPair> ranked;
  ranked.reserve(pairs.size());
  for (std::size_t c = 0; c < pairs.size(); ++c) {
    std::vector<double> abs_d;
    std::vector<double> p;
    for (std::size_t m = 0; m < d_matrix.size(); ++m) {
      const auto& d = d_matrix[m][c];
      const auto& pv = p_matrix[m][c];
      if (!d || !pv) continue;
      abs_d.push_back(std::fabs(*d));
      p.push_back(*pv);
    }
    RankedPair r;
    r.pair = pairs[c];
    r.metrics_used = abs_d.size();
    if (!abs_d.empty()) {
      r.median_abs_d = stats::median(abs_d);
      r.median_p = stats::median(p);
      r.transfer_candidate = r.median_abs_d < 0.2 && r.median_p > 0.05;
    }
    ranked.push_back(std::move(r));
  }
  auto name_key = [](const PairKey& k) {
    return std::minmax(k.a, k.b);
  };
  std::sort(ranked.begin(), ranked.end(), [&](const RankedPair& x, const RankedPair& y) {
    const bool xu = x.metrics_used > 0;
    const bool yu = y.metrics_used > 0;
    if (xu != yu) return xu;
    if (xu) {
      if (x.median_abs_d != y.median_abs_d) return x.median_abs_d < y.median_abs_d;
      if (x.median_p != y.median_p) return x.median_p > y.median_p;
    }
    return name_key(x.pair) < name_key(y.pair);
  });
  return ranked;
}

std::vector<RankedPair> rank_transferability(const ComparisonReport& report) {
  return rank_transferability(report.pairs, report.d_matrix(), report.p_matrix());
}

std::string verdict_line(const std::vector<RankedPair>& verdict) {
  constexpr std::string_view kRule =
      "rule: transfer-candidate when median |d| < 0.2 and median p > 0.05";
  if (verdict.empty() || verdict.front().metrics_used == 0) {
    return fmt::format("verdict: no dataset pair could be compared ({})", kRule);
  }
  const auto& best = verdict.front();
  return fmt::format(
      "verdict: most transfer-compatible pair is {} (median |d| = {:.4f}, median p = {:.3g}, {}) "
      "({})",
      best.pair.label(), best.median_abs_d, best.median_p,
      best.transfer_candidate ? "transfer-candidate" : "not a transfer-candidate", kRule);
}

}  // namespace simcmp::report
