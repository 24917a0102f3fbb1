#include <random>
#include <sstream>

#include <doctest.h>
#include <fmt/format.h>
#include <json.hpp>

#include "simcmp/cli.hpp"
#include "test_util.hpp"

using nlohmann::json;
using testutil::TempDir;
using testutil::fixture;
using testutil::read_text;
using testutil::write_text;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "simcmp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = simcmp::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string f(const char* name) { return fixture(name).string(); }

// Scores built with known mean and SD, exact after standardization.
void write_shifted(const std::filesystem::path& dir, double shift) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (const char* side : {"a", "b"}) {
    const std::size_t n = 400;
    std::vector<double> z(n);
    for (auto& v : z) v = g(rng);
    double mean = 0, ss = 0;
    for (double v : z) mean += v;
    mean /= n;
    for (double v : z) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / (n - 1));
    std::string data = "id,sentence1,sentence2,score\n";
    std::string scores = "# provider=synthetic\nid,score\n";
    const double offset = side[0] == 'a' ? 0.0 : shift;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string id = fmt::format("{}{}", side, i);
      data += fmt::format("{},x,y,1\n", id);
      scores += fmt::format("{},{:.17g}\n", id, (z[i] - mean) / sd * 0.1 + 0.5 + offset * 0.1);
    }
    write_text(dir / fmt::format("{}.csv", side), data);
    write_text(dir / fmt::format("{}_scores.csv", side), scores);
  }
}

}  // namespace

TEST_CASE("inspect prints a profile with k top words") {
  const auto r = run({"inspect", f("tiny.csv"), "--top-k", "5"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc["top_words"].size() == 5);
  CHECK(doc["record_count"] == 10);
}

TEST_CASE("inspect errors") {
  const auto bad = run({"inspect", "/nonexistent/data.csv"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("/nonexistent/data.csv") != std::string::npos);
  CHECK(bad.out.empty());
  CHECK(run({"inspect", f("tiny.csv"), "--top-k", "0"}).code == 2);
  CHECK(run({"inspect", f("tiny.csv"), "--bogus"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("inspect writes markdown or json files") {
  TempDir dir;
  REQUIRE(run({"inspect", f("tiny.csv"), "--out", (dir / "p.md").string()}).code == 0);
  CHECK(read_text(dir / "p.md").find("# Profile: tiny") == 0);
  REQUIRE(run({"inspect", f("three.jsonl"), "--code-mode", "--stopwords", "english", "--out",
               (dir / "p.json").string()})
              .code == 0);
  CHECK(json::parse(read_text(dir / "p.json"))["record_count"] == 3);
}

TEST_CASE("score jaccard writes one row per record") {
  const auto r = run({"score", f("tiny.csv"), "--metric", "jaccard"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "id,score");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 10);
}

TEST_CASE("score with a file output writes the sidecar") {
  TempDir dir;
  const auto out = (dir / "s.csv").string();
  const auto r = run({"score", f("tiny.csv"), "--metric", "negwmd", "--vectors",
                      f("tiny_vectors.txt"), "--out", out});
  REQUIRE(r.code == 0);
  CHECK(std::filesystem::exists(out));
  CHECK(std::filesystem::exists(out + ".skipped"));
}

TEST_CASE("score usage errors") {
  CHECK(run({"score", f("tiny.csv"), "--metric", "negwmd"}).code == 2);
  CHECK(run({"score", f("tiny.csv"), "--metric", "use"}).code == 2);
  CHECK(run({"score", f("tiny.csv")}).code == 2);
  CHECK(run({"score", f("tiny.csv"), "--metric", "jaccard", "--ground-cost", "manhattan"}).code ==
        2);
}

TEST_CASE("score exit codes for data and io problems") {
  TempDir dir;
  write_text(dir / "bad.cemb", "NOTCEMB");
  CHECK(run({"score", f("tiny.csv"), "--metric", "use", "--embeddings", (dir / "bad.cemb").string()})
            .code == 3);
  CHECK(run({"score", f("tiny.csv"), "--metric", "use", "--embeddings",
             (dir / "none.cemb").string()})
            .code == 4);
  CHECK(run({"score", f("tiny.csv"), "--metric", "jaccard", "--out",
             "/nonexistent/dir/s.csv"})
            .code == 4);
}

TEST_CASE("score contextual metrics") {
  const auto r = run({"score", f("four.csv"), "--metric", "use", "--embeddings", f("four.cemb")});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("f3,0.7071067") != std::string::npos);
  CHECK(r.out.find("f4,0.96") != std::string::npos);
  const auto direct = run({"score", f("tiny.csv"), "--metric", "cross", "--scores-file",
                           f("tiny_direct.csv")});
  CHECK(direct.code == 0);
}

TEST_CASE("compare a dataset with itself") {
  const auto r = run({"compare", f("tiny.csv"), f("tiny.csv"), "--metric", "jaccard", "--metric",
                      "tfidf", "--metric", "negwmd", "--vectors", f("tiny_vectors.txt"),
                      "--metric", "use", "--embeddings", f("tiny.cemb"), f("tiny.cemb")});
  REQUIRE(r.code == 0);
  TempDir dir;
  const auto out = (dir / "c.json").string();
  REQUIRE(run({"compare", f("tiny.csv"), f("tiny.csv"), "--metric", "jaccard", "--metric", "tfidf",
               "--metric", "negwmd", "--vectors", f("tiny_vectors.txt"), "--metric", "use",
               "--embeddings", f("tiny.cemb"), f("tiny.cemb"), "--out", out})
              .code == 0);
  const auto doc = json::parse(read_text(out));
  REQUIRE(doc["comparisons"].size() == 4);
  for (const auto& c : doc["comparisons"]) {
    CHECK(c["p"] == 1.0);
    CHECK(c["d"] == 0.0);
  }
}

TEST_CASE("compare output is identical for a fixed seed") {
  const std::vector<std::string> args{"compare", f("tiny.csv"), f("three.csv"), "--metric",
                                      "jaccard",  "--seed",     "7"};
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("seed 7") != std::string::npos);
}

TEST_CASE("compare recovers a constructed shift") {
  TempDir dir;
  write_shifted(dir.path(), 0.5);
  const auto out = (dir / "c.json").string();
  const auto r = run({"compare", (dir / "a.csv").string(), (dir / "b.csv").string(), "--metric",
                      "cross", "--scores-file", (dir / "a_scores.csv").string(),
                      (dir / "b_scores.csv").string(), "--out", out});
  REQUIRE(r.code == 0);
  const double d = json::parse(read_text(out))["comparisons"][0]["d"];
  CHECK(std::fabs(d - (-0.5)) < 0.05);
}

TEST_CASE("report command") {
  TempDir dir;
  const auto r = run({"report", f("demo/config.json"), "--out", (dir / "rep").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("verdict: ", 0) == 0);
  const auto doc = json::parse(read_text(dir / "rep" / "report.json"));
  CHECK(doc["p_matrix"]["columns"].size() == 3);

  write_text(dir / "bad.json",
             R"({"datasets": [{"path": "a.csv"}, {"path": "b.csv"}], "metrics": ["negwmd"]})");
  const auto bad = run({"report", (dir / "bad.json").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("metrics[0]") != std::string::npos);
  CHECK(run({"report", (dir / "missing.json").string()}).code == 2);
}
