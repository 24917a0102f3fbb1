#include <cmath>
#include <random>

#include <doctest.h>

#include "oracles.hpp"
#include "simcmp/error.hpp"
#include "simcmp/stats.hpp"

using namespace simcmp;
using namespace simcmp::stats;

namespace {

ScoreVector make_scores(const std::string& dataset, const std::string& metric,
                        const std::vector<double>& values) {
  ScoreVector s;
  s.dataset_name = dataset;
  s.metric_name = metric;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.scored.push_back({dataset + std::to_string(i), values[i]});
  }
  return s;
}

}  // namespace

TEST_CASE("paired t hand case") {
  std::vector<double> x{2, 4, 6}, y{1, 2, 3};
  const auto r = paired_t(x, y);
  CHECK(r.t == doctest::Approx(3.4641).epsilon(1e-4));
  CHECK(r.t == doctest::Approx(oracle::paired_t(x, y)).epsilon(1e-12));
  CHECK(r.df == 2);
  CHECK(r.n == 3);
  CHECK(std::fabs(r.p_two_tailed - 0.0742) < 1e-3);
  CHECK(r.p_two_tailed == doctest::Approx(oracle::p_df2(r.t)).epsilon(1e-12));
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("paired t degenerate inputs") {
  std::vector<double> x{1, 2, 3};
  const auto same = paired_t(x, x);
  CHECK(same.t == 0.0);
  CHECK(same.p_two_tailed == 1.0);
  CHECK_FALSE(same.degenerate);

  std::vector<double> shifted{2, 3, 4};
  const auto shift = paired_t(shifted, x);
  CHECK(std::isinf(shift.t));
  CHECK(shift.t > 0);
  CHECK(shift.p_two_tailed == 0.0);
  CHECK(shift.degenerate);

  std::vector<double> two{1, 2};
  std::vector<double> one{1};
  CHECK_THROWS_AS(paired_t(x, two), DimensionError);
  CHECK_THROWS_AS(paired_t(one, one), TooSmallError);
  std::vector<double> bad{1, NAN, 3};
  CHECK_THROWS_AS(paired_t(bad, x), DataError);
}

TEST_CASE("paired t matches textbook form on random samples") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> g(0.5, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng() % 200;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng) + 0.1;
    const auto r = paired_t(x, y);
    CHECK(r.t == doctest::Approx(oracle::paired_t(x, y)).epsilon(1e-9));
    CHECK(r.p_two_tailed ==
          doctest::Approx(oracle::p_boost(r.t, static_cast<double>(n - 1))).epsilon(1e-9));
  }
}

TEST_CASE("student t p closed forms") {
  CHECK(student_t_p_two_tailed(0.0, 5) == 1.0);
  CHECK(std::fabs(student_t_p_two_tailed(3.4641, 2) - 0.0742) < 1e-4);
  CHECK(std::fabs(student_t_p_two_tailed(12.7062, 1) - 0.05) < 1e-4);
  CHECK(std::fabs(oracle::p_df1(12.7062) - 0.05) < 1e-4);
  for (double t = 0.0; t <= 50.0; t += 0.37) {
    CHECK(std::fabs(student_t_p_two_tailed(t, 1) - oracle::p_df1(t)) < 1e-8);
    CHECK(std::fabs(student_t_p_two_tailed(-t, 2) - oracle::p_df2(t)) < 1e-8);
  }
}

TEST_CASE("log10 p reaches deep tails") {
  const double lp = student_t_log10_p_two_tailed(60.0, 200);
  CHECK(std::isfinite(lp));
  CHECK(lp < -100);
  CHECK(student_t_p_two_tailed(60.0, 200) >= 0.0);
  // Where p is representable the log agrees.
  const double p = student_t_p_two_tailed(8.0, 30);
  CHECK(student_t_log10_p_two_tailed(8.0, 30) == doctest::Approx(std::log10(p)).epsilon(1e-10));
}

TEST_CASE("incomplete beta") {
  CHECK(incomplete_beta(2, 3, 0.0) == 0.0);
  CHECK(incomplete_beta(2, 3, 1.0) == 1.0);
  // I_x(1, 1) = x, I_x(a, 1) = x^a
  CHECK(incomplete_beta(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(incomplete_beta(2.5, 1, 0.4) == doctest::Approx(std::pow(0.4, 2.5)).epsilon(1e-13));
  // symmetry I_x(a,b) = 1 - I_{1-x}(b,a)
  CHECK(incomplete_beta(3.2, 1.7, 0.35) ==
        doctest::Approx(1.0 - incomplete_beta(1.7, 3.2, 0.65)).epsilon(1e-13));
}

TEST_CASE("cohens d") {
  std::vector<double> x{0, 0, 2, 2}, y{1, 1, 3, 3};
  const auto e = cohens_d(x, y);
  CHECK(std::fabs(e.d - (-0.8660)) < 1e-4);
  CHECK(e.interpretation == Magnitude::kLarge);
  CHECK(magnitude_name(e.interpretation) == "large");
  const auto swapped = cohens_d(y, x);
  CHECK(swapped.d == doctest::Approx(-e.d));
  CHECK(swapped.interpretation == e.interpretation);

  std::vector<double> a{1, 2, 3}, b{3, 2, 1};
  CHECK(cohens_d(a, b).d == 0.0);
  CHECK(cohens_d(a, b).interpretation == Magnitude::kNegligible);

  std::vector<double> c1{1, 1}, c2{2, 2};
  const auto inf = cohens_d(c1, c2);
  CHECK(std::isinf(inf.d));
  CHECK(inf.d < 0);
  CHECK(inf.degenerate);
  CHECK(cohens_d(c1, c1).d == 0.0);
  CHECK_FALSE(cohens_d(c1, c1).degenerate);
}

TEST_CASE("effect thresholds") {
  CHECK(interpret_effect(0.0) == Magnitude::kNegligible);
  CHECK(interpret_effect(0.1999) == Magnitude::kNegligible);
  CHECK(interpret_effect(0.2) == Magnitude::kSmall);
  CHECK(interpret_effect(-0.4999) == Magnitude::kSmall);
  CHECK(interpret_effect(0.5) == Magnitude::kMedium);
  CHECK(interpret_effect(0.7999) == Magnitude::kMedium);
  CHECK(interpret_effect(-0.8) == Magnitude::kLarge);
  CHECK(interpret_effect(-INFINITY) == Magnitude::kLarge);
}

TEST_CASE("pairing") {
  std::vector<double> a(100), b(40);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = static_cast<double>(i);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = 1000.0 + static_cast<double>(i);
  const auto [pa, pb] = pair_samples(a, b, 42);
  REQUIRE(pa.size() == 40);
  CHECK(pb == b);
  for (std::size_t i = 1; i < pa.size(); ++i) CHECK(pa[i] > pa[i - 1]);
  const auto again = pair_samples(a, b, 42);
  CHECK(again.first == pa);
  const auto other = pair_samples(a, b, 7);
  CHECK(other.first != pa);

  const auto [sa, sb] = pair_samples(b, a, 42);
  CHECK(sa == b);
  CHECK(sb.size() == 40);

  std::vector<double> c(40, 1.0);
  const auto eq = pair_samples(b, c, 123);
  CHECK(eq.first == b);
  CHECK(eq.second == c);

  const auto idx = subsample_indices(10, 10, 1);
  CHECK(idx.size() == 10);
  CHECK(idx.back() == 9);
}

TEST_CASE("compare pair") {
  const auto a = make_scores("A", "m", {0.1, 0.5, 0.3, 0.9, 0.7});
  const auto self = compare_pair(a, a);
  CHECK(self.ttest.t == 0.0);
  CHECK(self.ttest.p_two_tailed == 1.0);
  CHECK(self.effect.d == 0.0);
  CHECK(self.ttest.seed == kDefaultSeed);
  CHECK(self.dataset_a == "A");
  CHECK(self.metric == "m");

  const auto other = make_scores("B", "other", {0.1, 0.2});
  CHECK_THROWS_AS(compare_pair(a, other), UsageError);
}

TEST_CASE("compare pair with a constructed large effect") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> lo(0.3, 0.1), hi(0.7, 0.1);
  std::vector<double> x(300), y(250);
  for (auto& v : x) v = lo(rng);
  for (auto& v : y) v = hi(rng);
  const auto c = compare_pair(make_scores("A", "m", x), make_scores("B", "m", y), 42);
  CHECK(c.effect.interpretation == Magnitude::kLarge);
  CHECK(c.effect.d == doctest::Approx(oracle::cohens_d(x, y)).epsilon(1e-12));
  CHECK(std::fabs(c.effect.d - (-4.0)) < 0.5);
  CHECK(c.ttest.n == 250);
  CHECK(c.ttest.p_two_tailed < 1e-10);
}

TEST_CASE("correlation") {
  std::vector<double> labels{0, 1, 2, 3};
  std::vector<double> squares{0, 1, 4, 9};
  CHECK(*pearson(labels, squares) == doctest::Approx(oracle::pearson(labels, squares)));
  CHECK(*pearson(labels, squares) == doctest::Approx(0.9583148).epsilon(1e-6));
  CHECK(*spearman(labels, squares) == doctest::Approx(1.0));
  CHECK(*pearson(labels, labels) == doctest::Approx(1.0));
  std::vector<double> neg{0, -1, -2, -3};
  CHECK(*pearson(labels, neg) == doctest::Approx(-1.0));
  CHECK(*spearman(labels, neg) == doctest::Approx(-1.0));
  std::vector<double> constant{2, 2, 2, 2};
  CHECK_FALSE(pearson(labels, constant));
  CHECK_FALSE(spearman(constant, labels));

  std::vector<double> ties{10, 20, 20, 30};
  CHECK(average_ranks(ties) == std::vector<double>{1, 2.5, 2.5, 4});
}

TEST_CASE("label score correlation uses scored records only") {
  corpus::Dataset d{"d", {{"a", "x", "y", 0}, {"b", "x", "y", 1}, {"c", "x", "y", 2},
                          {"e", "x", "y", 5}}};
  ScoreVector s;
  s.dataset_name = "d";
  s.metric_name = "m";
  s.scored = {{"a", 0.0}, {"b", 0.1}, {"c", 0.2}};
  s.skipped = {"e"};
  const auto c = label_score_correlation(d, s);
  CHECK(c.n == 3);
  CHECK(*c.pearson == doctest::Approx(1.0));
}

TEST_CASE("summary") {
  std::vector<double> v{4, 1, 3, 2, 5};
  const auto s = summarize(v);
  CHECK(s.n == 5);
  CHECK(s.mean == doctest::Approx(3.0));
  CHECK(s.sd == doctest::Approx(std::sqrt(2.5)));
  CHECK(s.min == 1);
  CHECK(s.q1 == 2);
  CHECK(s.median == 3);
  CHECK(s.q3 == 4);
  CHECK(s.max == 5);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
  CHECK(quantile({1, 2, 3, 4}, 0.25) == doctest::Approx(1.75));
  CHECK(median({7}) == 7);
  CHECK(summarize(std::vector<double>{}).n == 0);
}
