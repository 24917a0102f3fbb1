#include <doctest.h>
#include <json.hpp>

#include "simcmp/error.hpp"
#include "simcmp/report.hpp"
#include "test_util.hpp"

using namespace simcmp;
using namespace simcmp::report;
using nlohmann::json;
using testutil::TempDir;
using testutil::fixture;
using testutil::read_text;
using testutil::write_text;

namespace {

std::string quoted(const std::filesystem::path& p) { return json(p.string()).dump(); }

// Drops the one field that changes between runs.
std::string without_timestamp(const std::string& report_text) {
  auto doc = json::parse(report_text);
  doc["provenance"].erase("timestamp");
  return doc.dump();
}

std::string demo_config(const std::filesystem::path& out) {
  auto cfg = json::parse(read_text(fixture("demo/config.json")));
  cfg["output_dir"] = out.string();
  return cfg.dump();
}

}  // namespace

TEST_CASE("config parsing resolves paths and defaults") {
  const auto cfg = parse_run_config(
      R"({"datasets": [{"name": "a", "path": "x/a.csv"}, {"path": "b.jsonl"}],
          "metrics": ["jaccard", {"name": "w", "kind": "negwmd", "vectors": "v.txt",
                                   "ground_cost": "squared_euclidean"}],
          "tokenizer": {"code_mode": true, "stopwords": ["the"]}})",
      "/base");
  REQUIRE(cfg.datasets.size() == 2);
  CHECK(cfg.datasets[0].path == std::filesystem::path("/base/x/a.csv"));
  CHECK(cfg.datasets[1].name == "b");
  CHECK(cfg.datasets[1].format == corpus::FileFormat::kJsonl);
  CHECK(cfg.metrics[0].kind == MetricKind::kJaccard);
  CHECK(cfg.metrics[1].kind == MetricKind::kNegWmd);
  CHECK(cfg.metrics[1].vectors == std::filesystem::path("/base/v.txt"));
  CHECK(cfg.metrics[1].ground_cost == lexical::GroundCost::kSquaredEuclidean);
  CHECK(cfg.tokenizer.code_mode);
  CHECK(cfg.tokenizer.stopwords->count("the") == 1);
  CHECK(cfg.seed == 42);
  CHECK(cfg.top_k == 20);
  CHECK(cfg.output_dir == std::filesystem::path("/base/report"));
  CHECK(cfg.config_hash.size() == 64);
}

TEST_CASE("config hash ignores key order") {
  const auto a = parse_run_config(
      R"({"datasets": [{"path": "a.csv"}, {"path": "b.csv"}], "metrics": ["jaccard"], "seed": 1})",
      "/");
  const auto b = parse_run_config(
      R"({"seed": 1, "metrics": ["jaccard"], "datasets": [{"path": "a.csv"}, {"path": "b.csv"}]})",
      "/");
  CHECK(a.config_hash == b.config_hash);
  const auto c = parse_run_config(
      R"({"seed": 2, "metrics": ["jaccard"], "datasets": [{"path": "a.csv"}, {"path": "b.csv"}]})",
      "/");
  CHECK(a.config_hash != c.config_hash);
}

TEST_CASE("config errors name the field") {
  auto message = [](const std::string& text) -> std::string {
    try {
      parse_run_config(text, "/");
    } catch (const ConfigError& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message(R"({"datasets": [{"path": "a.csv"}, {"path": "b.csv"}],
                    "metrics": [{"name": "negwmd"}]})")
            .find("metrics[0].vectors") != std::string::npos);
  CHECK(message(R"({"datasets": [{"path": "a.csv"}, {"path": "b.csv"}],
                    "metrics": [{"name": "e", "kind": "embedding", "files": {"a": "a.cemb"}}]})")
            .find("metrics[0].files.b") != std::string::npos);
  CHECK(message(R"({"datasets": [{"path": "a.csv"}], "metrics": ["jaccard"]})")
            .find("datasets") != std::string::npos);
  CHECK(message(R"({"datasets": [{"path": "a.csv"}, {"path": "b.csv"}], "metrics": []})")
            .find("metrics") != std::string::npos);
  CHECK(message(R"({"datasets": [{"path": "a.csv"}, {"path": "x/a.csv"}], "metrics": ["jaccard"]})")
            .find("not unique") != std::string::npos);
  CHECK(message(R"({"datasets": [], "metrics": [], "colour": 1})").find("colour") !=
        std::string::npos);
  CHECK(message("{not json").find("JSON") != std::string::npos);
  CHECK(message(R"({"datasets": [{"path": "a.csv"}, {"path": "b.csv"}], "metrics": ["bleu"]})")
            .find("metrics[0]") != std::string::npos);
  CHECK(message(R"({"datasets": [{"path": "a.csv"}, {"path": "b.csv"}], "metrics": ["jaccard"],
                    "top_k": 0})")
            .find("top_k") != std::string::npos);
  CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("dataset pairs") {
  const auto pairs = dataset_pairs({"A", "B", "C"});
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[0].label() == "A vs B");
  CHECK(pairs[1].label() == "A vs C");
  CHECK(pairs[2].label() == "B vs C");
}

TEST_CASE("identical datasets give p = 1 and d = 0") {
  RunConfig cfg;
  cfg.datasets = {{"one", fixture("tiny.csv"), corpus::FileFormat::kCsv},
                  {"two", fixture("tiny.csv"), corpus::FileFormat::kCsv}};
  cfg.metrics = {{"jaccard", MetricKind::kJaccard, {}, {}, {}}};
  const auto r = run_pipeline(cfg);
  REQUIRE(r.cells.size() == 1);
  REQUIRE(r.cells[0].size() == 1);
  CHECK(*r.p_matrix()[0][0] == 1.0);
  CHECK(*r.d_matrix()[0][0] == 0.0);
  CHECK(r.failed_cells() == 0);
  CHECK(r.verdict.front().transfer_candidate);
}

TEST_CASE("three datasets and two metrics give a 2 x 3 grid") {
  TempDir dir;
  write_text(dir / "c.csv",
             "id,sentence1,sentence2,score\nx1,one two,two three,2\nx2,red blue,blue,3\n"
             "x3,a man,a dog,1\n");
  RunConfig cfg;
  cfg.datasets = {{"tiny", fixture("tiny.csv"), corpus::FileFormat::kCsv},
                  {"three", fixture("three.csv"), corpus::FileFormat::kCsv},
                  {"c", dir / "c.csv", corpus::FileFormat::kCsv}};
  cfg.metrics = {{"jaccard", MetricKind::kJaccard, {}, {}, {}},
                 {"tfidf", MetricKind::kTfIdf, {}, {}, {}}};
  const auto r = run_pipeline(cfg);
  const auto p = r.p_matrix();
  REQUIRE(p.size() == 2);
  for (const auto& row : p) CHECK(row.size() == 3);
  CHECK(r.verdict.size() == 3);
  CHECK(r.profiles.size() == 3);
  CHECK(r.scores.size() == 6);
}

TEST_CASE("failed cells are marked and the rest of the grid survives") {
  RunConfig cfg;
  cfg.datasets = {{"tiny", fixture("tiny.csv"), corpus::FileFormat::kCsv},
                  {"four", fixture("four.csv"), corpus::FileFormat::kCsv}};
  MetricSpec emb{"emb", MetricKind::kEmbedding, {}, {}, {}};
  emb.files = {{"tiny", fixture("tiny.cemb")}, {"four", fixture("missing.cemb")}};
  cfg.metrics = {{"jaccard", MetricKind::kJaccard, {}, {}, {}}, emb};
  const auto r = run_pipeline(cfg);
  CHECK(r.failed_cells() == 1);
  CHECK(r.cells[0][0].ok());
  CHECK_FALSE(r.cells[1][0].ok());
  CHECK_FALSE(r.p_matrix()[1][0].has_value());
  CHECK_FALSE(r.warnings.empty());
  CHECK(r.verdict.front().metrics_used == 1);

  const auto csv = matrix_csv(r, r.p_matrix());
  CHECK(csv.find("metric,tiny vs four\n") == 0);
  CHECK(csv.find("\nemb,\n") != std::string::npos);
}

TEST_CASE("provider mismatch fails the cell") {
  TempDir dir;
  write_text(dir / "a.csv", "# provider=one\nt1,0.5\nt2,0.6\nt3,0.7\n");
  write_text(dir / "b.csv", "# provider=two\nf1,0.5\nf2,0.6\nf3,0.7\nf4,0.1\n");
  RunConfig cfg;
  cfg.datasets = {{"tiny", fixture("tiny.csv"), corpus::FileFormat::kCsv},
                  {"four", fixture("four.csv"), corpus::FileFormat::kCsv}};
  MetricSpec direct{"cross", MetricKind::kDirect, {}, {}, {}};
  direct.files = {{"tiny", dir / "a.csv"}, {"four", dir / "b.csv"}};
  cfg.metrics = {direct};
  // Coverage of tiny is 3/10 here, so scoring itself fails first.
  auto r = run_pipeline(cfg);
  CHECK(r.failed_cells() == 1);

  write_text(dir / "a.csv",
             "# provider=one\nt1,1\nt2,1\nt3,1\nt4,1\nt5,2\nt6,3\nt7,1\nt8,1\nt9,1\nt10,0\n");
  r = run_pipeline(cfg);
  REQUIRE(r.failed_cells() == 1);
  CHECK(r.cells[0][0].error.find("provider") != std::string::npos);
}

TEST_CASE("ranking orders by median |d|, then p, then name") {
  const std::vector<PairKey> pairs{{"A", "B"}, {"A", "C"}, {"B", "C"}};
  Grid d{{0.45, 0.30, 0.05}};
  Grid p{{0.5, 0.5, 0.5}};
  auto ranked = rank_transferability(pairs, d, p);
  CHECK(ranked[0].pair.label() == "B vs C");
  CHECK(ranked[1].pair.label() == "A vs C");
  CHECK(ranked[2].pair.label() == "A vs B");
  CHECK(ranked[0].transfer_candidate);
  CHECK_FALSE(ranked[1].transfer_candidate);

  Grid zeros{{0.0, 0.0, 0.0}};
  Grid ones{{1.0, 1.0, 1.0}};
  const std::vector<PairKey> shuffled{{"B", "C"}, {"A", "C"}, {"A", "B"}};
  ranked = rank_transferability(shuffled, zeros, ones);
  CHECK(ranked[0].pair.label() == "A vs B");
  CHECK(ranked[1].pair.label() == "A vs C");
  CHECK(ranked[2].pair.label() == "B vs C");

  Grid tie_d{{0.1, 0.1, 0.1}};
  Grid tie_p{{0.2, 0.9, 0.5}};
  ranked = rank_transferability(pairs, tie_d, tie_p);
  CHECK(ranked[0].pair.label() == "A vs C");

  Grid missing{{std::nullopt, 0.9, 0.3}};
  ranked = rank_transferability(pairs, missing, ones);
  CHECK(ranked[2].pair.label() == "A vs B");
  CHECK(ranked[2].metrics_used == 0);
}

TEST_CASE("published Cohen's d table ranks the Mohler and SPRAG pair first") {
  const std::vector<PairKey> pairs{{"STSB", "Mohler"}, {"STSB", "SPRAG"}, {"Mohler", "SPRAG"}};
  const Grid d{{-0.482747, -0.505967, 0.039770}, {-0.200502, -0.413744, 0.228170},
               {-0.505459, -0.515482, 0.020581}, {-0.311332, -0.333331, 0.012037},
               {0.374094, 0.154802, 0.283053},   {0.436234, 0.170045, 0.340916},
               {0.407259, 0.174673, 0.295283},   {0.051829, -0.203635, 0.283045}};
  const Grid p{{2.64e-19, 5.55e-22, 4.41e-01}, {1.31e-04, 2.75e-15, 1.09e-05},
               {8.78e-21, 1.49e-22, 6.89e-01}, {4.11e-09, 1.42e-10, 8.14e-01},
               {9.63e-13, 2.88e-03, 5.34e-08}, {1.72e-16, 1.29e-03, 4.30e-11},
               {1.25e-14, 8.69e-04, 1.40e-08}, {3.20e-01, 9.55e-05, 5.22e-08}};
  const auto ranked = rank_transferability(pairs, d, p);
  CHECK(ranked[0].pair.label() == "Mohler vs SPRAG");
  CHECK(ranked[0].median_abs_d == doctest::Approx((0.228170 + 0.283045) / 2));
  CHECK(ranked[1].pair.label() == "STSB vs SPRAG");
  CHECK(ranked[2].pair.label() == "STSB vs Mohler");
  CHECK(verdict_line(ranked).find("Mohler vs SPRAG") != std::string::npos);
}

TEST_CASE("demo report is deterministic apart from the timestamp") {
  TempDir dir;
  const auto cfg1 = parse_run_config(demo_config(dir / "r1"), fixture("demo"));
  const auto cfg2 = parse_run_config(demo_config(dir / "r2"), fixture("demo"));
  write_report(run_pipeline(cfg1), cfg1);
  write_report(run_pipeline(cfg2), cfg2);
  const auto a = read_text(dir / "r1" / "report.json");
  const auto b = read_text(dir / "r2" / "report.json");
  REQUIRE_FALSE(a.empty());
  CHECK(without_timestamp(a) == without_timestamp(b));
  CHECK(read_text(dir / "r1" / "p_matrix.csv") == read_text(dir / "r2" / "p_matrix.csv"));
}

TEST_CASE("written report contents") {
  TempDir dir;
  const auto cfg = parse_run_config(demo_config(dir / "out"), fixture("demo"));
  const auto r = run_pipeline(cfg);
  const auto written = write_report(r, cfg);
  for (const char* name : {"report.json", "p_matrix.csv", "d_matrix.csv", "p_heatmap.svg",
                           "cohens_d.svg", "summary.md"}) {
    CHECK(std::filesystem::exists(dir / "out" / name));
  }
  CHECK(std::filesystem::exists(dir / "out" / "scores" / "physics__jaccard.csv"));
  CHECK(std::filesystem::exists(dir / "out" / "label_score" / "physics__jaccard.svg"));
  CHECK(written.size() > 6);

  const auto doc = nlohmann::ordered_json::parse(read_text(dir / "out" / "report.json"));
  std::vector<std::string> keys;
  for (const auto& item : doc.items()) keys.push_back(item.key());
  CHECK(keys.front() == "provenance");
  CHECK(doc["provenance"]["seed"] == 42);
  CHECK(doc["provenance"]["config_hash"] == cfg.config_hash);
  CHECK(doc["p_matrix"]["values"].size() == 5);
  CHECK(doc["p_matrix"]["columns"].size() == 3);
  CHECK(doc["verdict"]["ranking"][0]["pair"] == "physics vs biology");

  const auto md = read_text(dir / "out" / "summary.md");
  CHECK(md.find("verdict: most transfer-compatible pair is physics vs biology") !=
        std::string::npos);
  CHECK(md.find("| jaccard |") != std::string::npos);
}

TEST_CASE("emit flags limit the artifacts") {
  TempDir dir;
  auto cfg_json = json::parse(demo_config(dir / "only_json"));
  cfg_json["emit"] = {{"csv", false}, {"svg", false}, {"markdown", false}};
  const auto cfg = parse_run_config(cfg_json.dump(), fixture("demo"));
  write_report(run_pipeline(cfg), cfg);
  CHECK(std::filesystem::exists(dir / "only_json" / "report.json"));
  CHECK_FALSE(std::filesystem::exists(dir / "only_json" / "p_matrix.csv"));
  CHECK_FALSE(std::filesystem::exists(dir / "only_json" / "p_heatmap.svg"));
  CHECK_FALSE(std::filesystem::exists(dir / "only_json" / "summary.md"));
}

TEST_CASE("profile and comparison serializers") {
  corpus::Dataset d{"d", {{"r", "a b", "a", 1.0}, {"s", "c", "c", 4.0}}};
  const auto p = corpus::profile(d, {}, 2);
  const auto doc = json::parse(profile_json_text(p));
  CHECK(doc["top_words"].size() == 2);
  CHECK(doc["vocab"]["a"] == 2);
  CHECK(profile_markdown(p).find("| 1 | a | 2 |") != std::string::npos);

  stats::PairwiseComparison c;
  c.dataset_a = "x";
  c.dataset_b = "y";
  c.metric = "m";
  c.effect.d = -INFINITY;
  const auto cj = json::parse(comparisons_json_text({c}, 7));
  CHECK(cj["seed"] == 7);
  CHECK(cj["comparisons"][0]["d"] == "-inf");
}
