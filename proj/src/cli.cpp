#include "simcmp/cli.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "csv.hpp"
#include "simcmp/contextual.hpp"
#include "simcmp/error.hpp"
#include "simcmp/report.hpp"
#include "simcmp/version.hpp"

namespace simcmp::cli {

namespace {

namespace fs = std::filesystem;

struct DatasetArgs {
  std::string path;
  std::string format;
};

struct TokenizerArgs {
  bool code_mode = false;
  std::string stopwords;
};

corpus::Dataset load(const std::string& path, const std::string& format, std::ostream& err) {
  if (!fs::exists(path)) throw UsageError("dataset file not found: " + path);
  const auto file_format = format.empty() ? corpus::format_from_extension(path)
                                  : corpus::parse_format(format);
  corpus::LoadOptions options;
  options.name = fs::path(path).stem().string();
  auto result = corpus::load_dataset(path, file_format, options);
  for (const auto& r : result.rejected) {
    err << fmt::format("warning: {}: rejected row {}: {}\n", path, r.row, r.reason);
  }
  return std::move(result.dataset);
}

corpus::TokenizerConfig tokenizer_config(const TokenizerArgs& args) {
  corpus::TokenizerConfig config;
  config.code_mode = args.code_mode;
  if (args.stopwords.empty()) return config;
  if (args.stopwords == "english") {
    config.stopwords = corpus::english_stopwords();
    return config;
  }
  if (!fs::exists(args.stopwords)) throw UsageError("stopword file not found: " + args.stopwords);
  std::set<std::string, std::less<>> words;
  std::istringstream in(detail::read_file(args.stopwords));
  for (std::string line; std::getline(in, line);) {
    auto w = detail::trim(line);
    if (!w.empty()) words.emplace(w);
  }
  config.stopwords = std::move(words);
  return config;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("error writing '" + path + "'");
}

// Where a metric's scores come from, resolved from the flags.
struct MetricSource {
  std::string name;
  std::optional<lexical::LexicalMetric> lexical;
  bool direct = false;  // contextual: direct-score file rather than embeddings
};

MetricSource resolve_metric(const std::string& name, bool have_embeddings, bool have_scores,
                            bool have_vectors) {
  MetricSource src{name, lexical::parse_lexical_metric(name), false};
  if (src.lexical) {
    if (*src.lexical == lexical::LexicalMetric::kNegWmd && !have_vectors) {
      throw UsageError("metric negwmd needs --vectors");
    }
    return src;
  }
  if (!have_embeddings && !have_scores) {
    throw UsageError(fmt::format(
        "metric '{}' is contextual and needs --embeddings or --scores-file", name));
  }
  // With both inputs present, "direct" selects the score file.
  src.direct = !have_embeddings || (have_scores && name == "direct");
  return src;
}

ScoreVector score_with(const corpus::Dataset& dataset, const MetricSource& src,
                       const lexical::LexicalOptions& options,
                       const lexical::WordVectorStore* vectors, const std::string& contextual_file) {
  if (src.lexical) return lexical::score_dataset_lexical(dataset, *src.lexical, options, vectors);
  if (src.direct) {
    return contextual::score_dataset_contextual(dataset,
                                                contextual::load_direct_scores(contextual_file));
  }
  return contextual::score_dataset_contextual(dataset, contextual::load_embeddings(contextual_file));
}

lexical::GroundCost parse_ground_cost(const std::string& s) {
  if (s == "euclidean") return lexical::GroundCost::kEuclidean;
  if (s == "squared_euclidean") return lexical::GroundCost::kSquaredEuclidean;
  throw UsageError("--ground-cost must be euclidean or squared_euclidean");
}

std::optional<lexical::WordVectorStore> maybe_vectors(const std::string& path,
                                                      std::ostream& err) {
  if (path.empty()) return std::nullopt;
  if (!fs::exists(path)) throw UsageError("vector file not found: " + path);
  return lexical::load_word_vectors(path,
                                    [&](const std::string& msg) { err << "warning: " << msg << "\n"; });
}

void add_tokenizer_flags(CLI::App* cmd, TokenizerArgs& args) {
  cmd->add_flag("--code-mode", args.code_mode, "Treat punctuation and operators as tokens");
  cmd->add_option("--stopwords", args.stopwords, "'english' or a file with one stopword per line");
}

// --- commands ------------------------------------------------------------------

struct InspectArgs {
  DatasetArgs dataset;
  TokenizerArgs tokenizer;
  std::size_t top_k = 20;
  std::string out;
};

int cmd_inspect(const InspectArgs& args, std::ostream& out, std::ostream& err) {
  const auto dataset = load(args.dataset.path, args.dataset.format, err);
  const auto profile = corpus::profile(dataset, tokenizer_config(args.tokenizer), args.top_k);
  if (args.out.empty()) {
    out << report::profile_json_text(profile);
    return 0;
  }
  const auto ext = fs::path(args.out).extension().string();
  write_file(args.out, ext == ".md" ? report::profile_markdown(profile)
                                    : report::profile_json_text(profile));
  return 0;
}

struct ScoreArgs {
  DatasetArgs dataset;
  TokenizerArgs tokenizer;
  std::string metric;
  std::string vectors;
  std::string embeddings;
  std::string scores_file;
  std::string ground_cost = "euclidean";
  std::string out;
};

int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  const auto src = resolve_metric(args.metric, !args.embeddings.empty(),
                                  !args.scores_file.empty(), !args.vectors.empty());
  const lexical::LexicalOptions options{tokenizer_config(args.tokenizer),
                                        parse_ground_cost(args.ground_cost)};
  const auto dataset = load(args.dataset.path, args.dataset.format, err);
  const auto vectors = src.lexical ? maybe_vectors(args.vectors, err) : std::nullopt;
  const auto scores = score_with(dataset, src, options, vectors ? &*vectors : nullptr,
                                 src.direct ? args.scores_file : args.embeddings);
  if (args.out.empty()) {
    write_scores_csv(scores, out);
    for (const auto& id : scores.skipped) err << "skipped: " << id << "\n";
  } else {
    export_scores(scores, args.out);
  }
  if (!scores.skipped.empty()) {
    err << fmt::format("note: {} of {} records skipped\n", scores.skipped.size(), dataset.size());
  }
  return 0;
}

struct CompareArgs {
  DatasetArgs a;
  DatasetArgs b;
  TokenizerArgs tokenizer;
  std::vector<std::string> metrics;
  std::string vectors;
  std::vector<std::string> embeddings;
  std::vector<std::string> scores_files;
  std::string ground_cost = "euclidean";
  std::uint64_t seed = stats::kDefaultSeed;
  std::string out;
};

int cmd_compare(const CompareArgs& args, std::ostream& out, std::ostream& err) {
  std::vector<MetricSource> sources;
  for (const auto& m : args.metrics) {
    sources.push_back(resolve_metric(m, !args.embeddings.empty(), !args.scores_files.empty(),
                                     !args.vectors.empty()));
  }
  const lexical::LexicalOptions options{tokenizer_config(args.tokenizer),
                                        parse_ground_cost(args.ground_cost)};
  const auto a = load(args.a.path, args.a.format, err);
  const auto b = load(args.b.path, args.b.format, err);
  std::optional<lexical::WordVectorStore> vectors;
  for (const auto& s : sources) {
    if (s.lexical == lexical::LexicalMetric::kNegWmd && !vectors) {
      vectors = maybe_vectors(args.vectors, err);
    }
  }

  std::vector<stats::PairwiseComparison> rows;
  for (const auto& src : sources) {
    const auto& files = src.direct ? args.scores_files : args.embeddings;
    auto sa = score_with(a, src, options, vectors ? &*vectors : nullptr,
                         src.lexical ? std::string() : files[0]);
    auto sb = score_with(b, src, options, vectors ? &*vectors : nullptr,
                         src.lexical ? std::string() : files[1]);
    if (sa.metric_name != sb.metric_name) {
      throw UsageError(fmt::format("metric '{}': providers differ ('{}' vs '{}')", src.name,
                                   sa.metric_name, sb.metric_name));
    }
    sa.metric_name = src.name;
    sb.metric_name = src.name;
    rows.push_back(stats::compare_pair(sa, sb, args.seed));
  }

  out << fmt::format("{} vs {} (seed {})\n", a.name, b.name, args.seed);
  out << fmt::format("{:<14} {:>12} {:>6} {:>12} {:>10}  {}\n", "metric", "t", "df", "p", "d",
                     "interpretation");
  for (const auto& r : rows) {
    out << fmt::format("{:<14} {:>12.4f} {:>6} {:>12} {:>10.4f}  {}\n", r.metric, r.ttest.t,
                       r.ttest.df, report::format_sci(r.ttest.p_two_tailed), r.effect.d,
                       stats::magnitude_name(r.effect.interpretation));
  }
  if (!args.out.empty()) write_file(args.out, report::comparisons_json_text(rows, args.seed));
  return 0;
}

struct ReportArgs {
  std::string config;
  std::string out;
};

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  auto config = report::load_run_config(args.config);
  if (!args.out.empty()) config.output_dir = args.out;
  const auto result = report::run_pipeline(config);
  report::write_report(result, config);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  out << report::verdict_line(result.verdict) << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compare sentence-pair similarity datasets with lexical and contextual metrics",
               "simcmp"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1, 1);

  InspectArgs inspect;
  auto* c_inspect = app.add_subcommand("inspect", "Profile one dataset");
  c_inspect->add_option("dataset", inspect.dataset.path, "Dataset file")->required();
  c_inspect->add_option("--format", inspect.dataset.format, "csv, tsv or jsonl");
  c_inspect->add_option("--top-k", inspect.top_k, "Number of top words")
      ->check(CLI::PositiveNumber);
  add_tokenizer_flags(c_inspect, inspect.tokenizer);
  c_inspect->add_option("--out", inspect.out, "Write .json or .md instead of stdout JSON");

  ScoreArgs score;
  auto* c_score = app.add_subcommand("score", "Score every record of one dataset");
  c_score->add_option("dataset", score.dataset.path, "Dataset file")->required();
  c_score->add_option("--format", score.dataset.format, "csv, tsv or jsonl");
  c_score->add_option("--metric", score.metric,
                      "jaccard, tfidf, negwmd or a contextual provider name")
      ->required();
  c_score->add_option("--vectors", score.vectors, "Word vector text file (negwmd)");
  c_score->add_option("--embeddings", score.embeddings, "CEMB1 embedding file");
  c_score->add_option("--scores-file", score.scores_file, "Direct-score CSV file");
  c_score->add_option("--ground-cost", score.ground_cost, "euclidean or squared_euclidean");
  add_tokenizer_flags(c_score, score.tokenizer);
  c_score->add_option("--out", score.out, "Output CSV (a .skipped sidecar is written next to it)");

  CompareArgs compare;
  auto* c_compare = app.add_subcommand("compare", "Compare two datasets metric by metric");
  c_compare->add_option("dataset_a", compare.a.path, "First dataset")->required();
  c_compare->add_option("dataset_b", compare.b.path, "Second dataset")->required();
  c_compare->add_option("--format-a", compare.a.format, "Format of the first dataset");
  c_compare->add_option("--format-b", compare.b.format, "Format of the second dataset");
  c_compare->add_option("--metric", compare.metrics, "Metric (repeatable)")->required();
  c_compare->add_option("--vectors", compare.vectors, "Word vector text file (negwmd)");
  c_compare->add_option("--embeddings", compare.embeddings, "CEMB1 files for A and B")
      ->expected(2);
  c_compare->add_option("--scores-file", compare.scores_files, "Direct-score files for A and B")
      ->expected(2);
  c_compare->add_option("--ground-cost", compare.ground_cost, "euclidean or squared_euclidean");
  c_compare->add_option("--seed", compare.seed, "Pairing seed");
  add_tokenizer_flags(c_compare, compare.tokenizer);
  c_compare->add_option("--out", compare.out, "Write the comparison as JSON");

  ReportArgs rep;
  auto* c_report = app.add_subcommand("report", "Run a full comparison from a JSON config");
  c_report->add_option("config", rep.config, "Run configuration (JSON)")->required();
  c_report->add_option("--out", rep.out, "Override the config's output_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : exit_code(ErrorKind::kUsage);
  }

  try {
    if (c_inspect->parsed()) return cmd_inspect(inspect, out, err);
    if (c_score->parsed()) return cmd_score(score, out, err);
    if (c_compare->parsed()) return cmd_compare(compare, out, err);
    return cmd_report(rep, out, err);
  } catch (const Error& e) {
    err << "simcmp: error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "simcmp: internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace simcmp::cli
