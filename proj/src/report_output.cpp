#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "csv.hpp"
#include "simcmp/error.hpp"
#include "simcmp/report.hpp"

namespace simcmp::report {

namespace {

using ojson = nlohmann::ordered_json;

constexpr std::string_view kRule =
    "a pair is a transfer-candidate when the median |d| across metrics is below 0.2 and the "
    "median p-value is above 0.05";
constexpr std::string_view kPairing =
    "the longer score list is subsampled without replacement to the shorter length, keeping "
    "original order (mt19937_64 seeded with the run seed); Cohen's d uses the full lists";

// 12 significant digits; infinities become strings, NaN null.
ojson num(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return std::stod(fmt::format("{:.12g}", v));
}

ojson opt_num(const std::optional<double>& v) { return v ? num(*v) : ojson(nullptr); }

ojson grid_json(const ComparisonReport& report, const Grid& grid) {
  ojson out;
  out["rows"] = report.metric_names;
  ojson cols = ojson::array();
  for (const auto& p : report.pairs) cols.push_back(p.label());
  out["columns"] = std::move(cols);
  ojson values = ojson::array();
  for (const auto& row : grid) {
    ojson r = ojson::array();
    for (const auto& v : row) r.push_back(opt_num(v));
    values.push_back(std::move(r));
  }
  out["values"] = std::move(values);
  return out;
}

ojson profile_json(const corpus::CorpusProfile& p) {
  ojson out;
  out["dataset"] = p.dataset_name;
  out["record_count"] = p.record_count;
  out["label_histogram"] = p.label_histogram;
  auto density = [](const std::map<std::size_t, std::size_t>& m) {
    ojson arr = ojson::array();
    for (const auto& [len, count] : m) arr.push_back({len, count});
    return arr;
  };
  out["length_density_s1"] = density(p.length_density_s1);
  out["length_density_s2"] = density(p.length_density_s2);
  ojson top = ojson::array();
  for (const auto& [w, n] : p.top_words) top.push_back({w, n});
  out["top_words"] = std::move(top);
  out["vocab_size"] = p.vocab.size();
  ojson vocab = ojson::object();
  for (const auto& [w, n] : p.vocab) vocab[w] = n;
  out["vocab"] = std::move(vocab);
  return out;
}

std::string safe_name(std::string_view s) {
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    out.push_back(std::isalnum(u) != 0 || c == '-' || c == '_' || c == '.' ? c : '_');
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("error writing '" + path.string() + "'");
}

ojson ttest_json(const stats::PairwiseComparison& c) {
  ojson item;
  item["t"] = num(c.ttest.t);
  item["df"] = c.ttest.df;
  item["n"] = c.ttest.n;
  item["p"] = num(c.ttest.p_two_tailed);
  item["log10_p"] = num(c.ttest.log10_p);
  item["d"] = num(c.effect.d);
  item["interpretation"] = stats::magnitude_name(c.effect.interpretation);
  item["degenerate"] = c.ttest.degenerate || c.effect.degenerate;
  return item;
}

}  // namespace

std::string profile_json_text(const corpus::CorpusProfile& profile) {
  return profile_json(profile).dump(2) + "\n";
}

std::string profile_markdown(const corpus::CorpusProfile& p) {
  std::ostringstream md;
  md << "# Profile: " << p.dataset_name << "\n\n";
  md << "Records: " << p.record_count << ", vocabulary size: " << p.vocab.size() << "\n\n";
  md << "## Label histogram\n\n| label | count |\n|---|---|\n";
  for (std::size_t i = 0; i < p.label_histogram.size(); ++i) {
    md << "| " << i << " | " << p.label_histogram[i] << " |\n";
  }
  md << "\n## Top words\n\n| rank | word | count |\n|---|---|---|\n";
  for (std::size_t i = 0; i < p.top_words.size(); ++i) {
    md << "| " << i + 1 << " | " << p.top_words[i].first << " | " << p.top_words[i].second
       << " |\n";
  }
  md << "\n## Sentence length (tokens)\n\n| length | sentence1 | sentence2 |\n|---|---|---|\n";
  std::set<std::size_t> lengths;
  for (const auto& [len, n] : p.length_density_s1) lengths.insert(len);
  for (const auto& [len, n] : p.length_density_s2) lengths.insert(len);
  auto get = [](const std::map<std::size_t, std::size_t>& m, std::size_t k) {
    auto it = m.find(k);
    return it == m.end() ? std::size_t{0} : it->second;
  };
  for (auto len : lengths) {
    md << "| " << len << " | " << get(p.length_density_s1, len) << " | "
       << get(p.length_density_s2, len) << " |\n";
  }
  return md.str();
}

std::string comparisons_json_text(const std::vector<stats::PairwiseComparison>& rows,
                                  std::uint64_t seed) {
  ojson doc;
  doc["seed"] = seed;
  doc["pairing"] = kPairing;
  ojson items = ojson::array();
  for (const auto& c : rows) {
    ojson item;
    item["dataset_a"] = c.dataset_a;
    item["dataset_b"] = c.dataset_b;
    item["metric"] = c.metric;
    const auto stats_part = ttest_json(c);
    for (const auto& el : stats_part.items()) item[el.key()] = el.value();
    items.push_back(std::move(item));
  }
  doc["comparisons"] = std::move(items);
  return doc.dump(2) + "\n";
}

std::string report_json(const ComparisonReport& report) {
  ojson doc;

  ojson prov;
  prov["toolkit"] = "simcmp";
  prov["version"] = report.provenance.version;
  prov["config_hash"] = report.provenance.config_hash;
  prov["seed"] = report.provenance.seed;
  prov["pairing"] = kPairing;
  prov["timestamp"] = report.provenance.timestamp;
  doc["provenance"] = std::move(prov);

  ojson datasets = ojson::array();
  for (const auto& d : report.datasets) {
    ojson item;
    item["name"] = d.name;
    item["records"] = d.records;
    ojson rejected = ojson::array();
    for (const auto& r : d.rejected) rejected.push_back({{"row", r.row}, {"reason", r.reason}});
    item["rejected"] = std::move(rejected);
    item["error"] = d.error.empty() ? ojson(nullptr) : ojson(d.error);
    datasets.push_back(std::move(item));
  }
  doc["datasets"] = std::move(datasets);
  doc["metrics"] = report.metric_names;

  ojson profiles = ojson::array();
  for (const auto& p : report.profiles) profiles.push_back(profile_json(p));
  doc["profiles"] = std::move(profiles);

  ojson summaries = ojson::array();
  ojson correlations = ojson::array();
  for (const auto& s : report.scores) {
    ojson item;
    item["dataset"] = s.dataset;
    item["metric"] = s.metric;
    item["provider"] = s.provider;
    item["n"] = s.summary.n;
    item["skipped"] = s.skipped;
    item["mean"] = num(s.summary.mean);
    item["sd"] = num(s.summary.sd);
    item["min"] = num(s.summary.min);
    item["q1"] = num(s.summary.q1);
    item["median"] = num(s.summary.median);
    item["q3"] = num(s.summary.q3);
    item["max"] = num(s.summary.max);
    item["error"] = s.error.empty() ? ojson(nullptr) : ojson(s.error);
    summaries.push_back(std::move(item));

    ojson corr;
    corr["dataset"] = s.dataset;
    corr["metric"] = s.metric;
    corr["n"] = s.correlation.n;
    corr["pearson"] = opt_num(s.correlation.pearson);
    corr["spearman"] = opt_num(s.correlation.spearman);
    correlations.push_back(std::move(corr));
  }
  doc["score_summaries"] = std::move(summaries);
  doc["correlations"] = std::move(correlations);

  doc["p_matrix"] = grid_json(report, report.p_matrix());
  doc["d_matrix"] = grid_json(report, report.d_matrix());

  ojson cells = ojson::array();
  for (std::size_t m = 0; m < report.cells.size(); ++m) {
    for (std::size_t c = 0; c < report.cells[m].size(); ++c) {
      const auto& cell = report.cells[m][c];
      ojson item;
      item["metric"] = report.metric_names[m];
      item["pair"] = report.pairs[c].label();
      if (cell.ok()) {
        const auto stats_part = ttest_json(*cell.comparison);
        for (const auto& el : stats_part.items()) item[el.key()] = el.value();
        item["error"] = nullptr;
      } else {
        item["error"] = cell.error;
      }
      cells.push_back(std::move(item));
    }
  }
  doc["cells"] = std::move(cells);

  ojson verdict;
  verdict["rule"] = kRule;
  ojson ranking = ojson::array();
  for (const auto& r : report.verdict) {
    ojson item;
    item["pair"] = r.pair.label();
    item["metrics_used"] = r.metrics_used;
    item["median_abs_d"] = r.metrics_used ? num(r.median_abs_d) : ojson(nullptr);
    item["median_p"] = r.metrics_used ? num(r.median_p) : ojson(nullptr);
    item["transfer_candidate"] = r.transfer_candidate;
    ranking.push_back(std::move(item));
  }
  verdict["ranking"] = std::move(ranking);
  verdict["summary"] = verdict_line(report.verdict);
  doc["verdict"] = std::move(verdict);
  doc["warnings"] = report.warnings;

  return doc.dump(2) + "\n";
}

std::string matrix_csv(const ComparisonReport& report, const Grid& grid) {
  std::ostringstream out;
  out << "metric";
  for (const auto& p : report.pairs) out << ',' << detail::escape_field(p.label());
  out << '\n';
  for (std::size_t m = 0; m < grid.size(); ++m) {
    out << detail::escape_field(report.metric_names[m]);
    for (const auto& v : grid[m]) {
      out << ',';
      if (v) out << fmt::format("{:.12g}", *v);
    }
    out << '\n';
  }
  return out.str();
}

std::string markdown_summary(const ComparisonReport& report) {
  std::ostringstream md;
  md << "# Dataset comparison report\n\n";
  md << fmt::format("simcmp {} · seed {} · config {}\n\n", report.provenance.version,
                    report.provenance.seed, report.provenance.config_hash.substr(0, 12));

  md << "## Datasets\n\n| dataset | records | rejected rows | top words |\n|---|---|---|---|\n";
  for (const auto& d : report.datasets) {
    std::string top;
    for (const auto& p : report.profiles) {
      if (p.dataset_name != d.name) continue;
      for (std::size_t i = 0; i < p.top_words.size() && i < 10; ++i) {
        if (i) top += ", ";
        top += fmt::format("{} ({})", p.top_words[i].first, p.top_words[i].second);
      }
    }
    md << fmt::format("| {} | {} | {} | {} |\n", d.name,
                      d.error.empty() ? std::to_string(d.records) : "load failed",
                      d.rejected.size(), top);
  }

  auto header = [&] {
    md << "| metric |";
    for (const auto& p : report.pairs) md << ' ' << p.label() << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < report.pairs.size(); ++i) md << "---|";
    md << '\n';
  };

  md << "\n## Paired t-test p-values\n\n";
  header();
  for (std::size_t m = 0; m < report.cells.size(); ++m) {
    md << "| " << report.metric_names[m] << " |";
    for (const auto& cell : report.cells[m]) {
      md << ' ' << (cell.ok() ? format_sci(cell.comparison->ttest.p_two_tailed) : "failed")
         << " |";
    }
    md << '\n';
  }

  md << "\n## Cohen's d\n\n";
  header();
  for (std::size_t m = 0; m < report.cells.size(); ++m) {
    md << "| " << report.metric_names[m] << " |";
    for (const auto& cell : report.cells[m]) {
      if (cell.ok()) {
        const auto& e = cell.comparison->effect;
        md << fmt::format(" {:.6f} ({}) |", e.d, stats::magnitude_name(e.interpretation));
      } else {
        md << " failed |";
      }
    }
    md << '\n';
  }

  md << "\n## Label-score correlation\n\n| dataset | metric | n | skipped | Pearson | Spearman |\n"
        "|---|---|---|---|---|---|\n";
  auto coef = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.4f}", *v) : std::string("n/a");
  };
  for (const auto& s : report.scores) {
    if (!s.ok()) continue;
    md << fmt::format("| {} | {} | {} | {} | {} | {} |\n", s.dataset, s.metric, s.summary.n,
                      s.skipped, coef(s.correlation.pearson), coef(s.correlation.spearman));
  }

  md << "\n## Transferability\n\n| rank | pair | median abs d | median p | candidate |\n"
        "|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < report.verdict.size(); ++i) {
    const auto& r = report.verdict[i];
    if (r.metrics_used == 0) {
      md << fmt::format("| {} | {} | n/a | n/a | no |\n", i + 1, r.pair.label());
      continue;
    }
    md << fmt::format("| {} | {} | {:.4f} | {} | {} |\n", i + 1, r.pair.label(), r.median_abs_d,
                      format_sci(r.median_p), r.transfer_candidate ? "yes" : "no");
  }
  md << '\n' << verdict_line(report.verdict) << "\n\nDecision rule: " << kRule
     << ".\n\nPairing: " << kPairing << ".\n";

  if (!report.warnings.empty()) {
    md << "\n## Warnings\n\n";
    for (const auto& w : report.warnings) md << "- " << w << '\n';
  }
  return md.str();
}

std::vector<std::filesystem::path> write_report(const ComparisonReport& report,
                                                const RunConfig& config) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  const auto& dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  auto put = [&](const fs::path& path, const std::string& text) {
    write_text(path, text);
    written.push_back(path);
  };

  if (config.emit.json) put(dir / "report.json", report_json(report));
  if (config.emit.csv) {
    put(dir / "p_matrix.csv", matrix_csv(report, report.p_matrix()));
    put(dir / "d_matrix.csv", matrix_csv(report, report.d_matrix()));
    fs::create_directories(dir / "scores", ec);
    if (ec) throw IoError("cannot create '" + (dir / "scores").string() + "': " + ec.message());
    for (const auto& s : report.scores) {
      if (!s.ok()) continue;
      const auto path = dir / "scores" / (safe_name(s.dataset) + "__" + safe_name(s.metric) + ".csv");
      export_scores(*s.scores, path);
      written.push_back(path);
      written.push_back(skipped_sidecar_path(path));
    }
  }
  if (config.emit.svg) {
    const std::vector<std::string> cols = [&] {
      std::vector<std::string> c;
      for (const auto& p : report.pairs) c.push_back(p.label());
      return c;
    }();
    if (!report.metric_names.empty() && !report.pairs.empty()) {
      put(dir / "p_heatmap.svg", render_heatmap(report.p_matrix(), report.metric_names, cols));
      put(dir / "cohens_d.svg", render_bar_chart(report.d_matrix(), report.metric_names, cols));
    }
    fs::create_directories(dir / "label_score", ec);
    if (ec) throw IoError("cannot create label_score directory: " + ec.message());
    for (const auto& s : report.scores) {
      if (!s.ok() || s.scores->scored.empty()) continue;
      const corpus::Dataset* dataset = nullptr;
      for (const auto& d : report.loaded) {
        if (d.name == s.dataset) dataset = &d;
      }
      if (dataset == nullptr) continue;
      put(dir / "label_score" / (safe_name(s.dataset) + "__" + safe_name(s.metric) + ".svg"),
          render_label_score_plot(*dataset, *s.scores));
    }
  }
  if (config.emit.markdown) put(dir / "summary.md", markdown_summary(report));
  return written;
}

}  // namespace simcmp::report
