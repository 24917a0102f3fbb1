#include "simcmp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <unordered_map>

#include <fmt/format.h>

#include "simcmp/error.hpp"

namespace simcmp::stats {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample variance (n - 1 denominator), two-pass.
double variance_of(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

}  // namespace

// --- paired t-test ---------------------------------------------------------

PairedTTestResult paired_t(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionError(fmt::format("paired t-test needs equal lengths, got {} and {}", x.size(),
                                     y.size()));
  }
  const std::size_t n = x.size();
  if (n < 2) throw TooSmallError("paired t-test needs at least 2 pairs");

  long double sum_d = 0.0L;
  long double sum_d2 = 0.0L;
  double first = x[0] - y[0];
  bool all_equal = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    if (!std::isfinite(d)) throw DataError("paired t-test on non-finite values");
    all_equal = all_equal && d == first;
    sum_d += d;
    sum_d2 += static_cast<long double>(d) * d;
  }

  PairedTTestResult r;
  r.n = n;
  r.df = n - 1;
  const auto nl = static_cast<long double>(n);
  const long double spread = (nl * sum_d2 - sum_d * sum_d) / (nl - 1.0L);
  if (all_equal || spread <= 0.0L) {
    if (sum_d == 0.0L) {
      r.t = 0.0;
      r.p_two_tailed = 1.0;
      r.log10_p = 0.0;
    } else {
      r.t = sum_d > 0.0L ? kInf : -kInf;
      r.p_two_tailed = 0.0;
      r.log10_p = -kInf;
      r.degenerate = true;
    }
    return r;
  }
  r.t = static_cast<double>(sum_d / std::sqrt(spread));
  r.p_two_tailed = student_t_p_two_tailed(r.t, static_cast<double>(r.df));
  r.log10_p = student_t_log10_p_two_tailed(r.t, static_cast<double>(r.df));
  return r;
}

// --- effect size -----------------------------------------------------------

std::string_view magnitude_name(Magnitude m) {
  switch (m) {
    case Magnitude::kNegligible: return "negligible";
    case Magnitude::kSmall: return "small";
    case Magnitude::kMedium: return "medium";
    case Magnitude::kLarge: return "large";
  }
  return "?";
}

Magnitude interpret_effect(double d) {
  const double a = std::fabs(d);
  if (a < 0.2) return Magnitude::kNegligible;
  if (a < 0.5) return Magnitude::kSmall;
  if (a < 0.8) return Magnitude::kMedium;
  return Magnitude::kLarge;
}

EffectSize cohens_d(std::span<const double> x, std::span<const double> y) {
  if (x.size() < 2 || y.size() < 2) {
    throw TooSmallError("Cohen's d needs at least 2 values per sample");
  }
  const double mx = mean_of(x);
  const double my = mean_of(y);
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  const double pooled = std::sqrt(((n1 - 1.0) * variance_of(x, mx) +
                                   (n2 - 1.0) * variance_of(y, my)) / (n1 + n2 - 2.0));
  EffectSize e;
  if (pooled == 0.0) {
    if (mx == my) {
      e.d = 0.0;
    } else {
      e.d = mx > my ? kInf : -kInf;
      e.degenerate = true;
    }
  } else {
    e.d = (mx - my) / pooled;
  }
  e.interpretation = interpret_effect(e.d);
  return e;
}

// --- pairing -------------------------------------------------------------

std::vector<std::size_t> subsample_indices(std::size_t population, std::size_t count,
                                           std::uint64_t seed) {
  std::vector<std::size_t> all(population);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (count >= population) return all;
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  std::mt19937_64 rng(seed);
  std::sample(all.begin(), all.end(), std::back_inserter(chosen), count, rng);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::pair<std::vector<double>, std::vector<double>> pair_samples(std::span<const double> a,
                                                                 std::span<const double> b,
                                                                 std::uint64_t seed) {
  if (a.empty() || b.empty()) throw TooSmallError("cannot pair an empty sample");
  const std::size_t n = std::min(a.size(), b.size());
  if (n < 2) throw TooSmallError("paired samples need at least 2 values each");
  auto take = [&](std::span<const double> v) {
    std::vector<double> out;
    out.reserve(n);
    for (auto i : subsample_indices(v.size(), n, seed)) out.push_back(v[i]);
    return out;
  };
  return {take(a), take(b)};
}

PairwiseComparison compare_pair(const ScoreVector& a, const ScoreVector& b, std::uint64_t seed) {
  if (a.metric_name != b.metric_name) {
    throw UsageError("cannot compare metric '" + a.metric_name + "' with '" + b.metric_name + "'");
  }
  const auto va = a.values();
  const auto vb = b.values();
  const auto [pa, pb] = pair_samples(va, vb, seed);
  PairwiseComparison out;
  out.dataset_a = a.dataset_name;
  out.dataset_b = b.dataset_name;
  out.metric = a.metric_name;
  out.ttest = paired_t(pa, pb);
  out.ttest.seed = seed;
  out.effect = cohens_d(va, vb);
  return out;
}

// --- correlation -----------------------------------------------------------

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw DimensionError(fmt::format("correlation needs equal lengths, got {} and {}", x.size(),
                                     y.size()));
  }
  if (x.size() < 2) return std::nullopt;
  const double mx = mean_of(x);
  const double my = mean_of(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(std::span<const double> x, std::span<const double> y) {
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry);
}

Correlation label_score_correlation(const corpus::Dataset& dataset, const ScoreVector& scores) {
  std::unordered_map<std::string_view, double> label_of;
  label_of.reserve(dataset.size());
  for (const auto& r : dataset.records) label_of.emplace(r.id, r.label);
  std::vector<double> labels;
  std::vector<double> values;
  for (const auto& s : scores.scored) {
    auto it = label_of.find(s.id);
    if (it == label_of.end()) continue;
    labels.push_back(it->second);
    values.push_back(s.score);
  }
  Correlation c;
  c.n = labels.size();
  c.pearson = pearson(labels, values);
  c.spearman = spearman(labels, values);
  return c;
}

// --- descriptive ---------------------------------------------------------

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

Summary summarize(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  s.mean = mean_of(values);
  s.sd = values.size() > 1 ? std::sqrt(variance_of(values, s.mean)) : 0.0;
  s.min = sorted.front();
  s.max = sorted.back();
  s.q1 = quantile(sorted, 0.25);
  s.median = quantile(sorted, 0.5);
  s.q3 = quantile(sorted, 0.75);
  return s;
}

}  // namespace simcmp::stats
