#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "simcmp/corpus.hpp"
#include "simcmp/score_vector.hpp"

namespace simcmp::stats {

inline constexpr std::uint64_t kDefaultSeed = 42;

// --- special functions ---------------------------------------------------

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double incomplete_beta(double a, double b, double x);

/// Two-tailed Student-t tail probability 2 (1 - F_df(|t|)) = I_{df/(df+t^2)}(df/2, 1/2).
/// Infinite |t| gives 0. Throws std::invalid_argument for df < 1 or NaN t.
double student_t_p_two_tailed(double t, double df);

/// log10 of the same probability, accurate where the probability underflows.
double student_t_log10_p_two_tailed(double t, double df);

// --- paired t-test ---------------------------------------------------------

struct PairedTTestResult {
  double t = 0.0;
  std::size_t df = 0;
  double p_two_tailed = 1.0;
  double log10_p = 0.0;
  std::size_t n = 0;
  std::optional<std::uint64_t> seed;
  /// The differences have zero variance but nonzero mean: t is +-infinity, p = 0.
  bool degenerate = false;
};

/// Paired t-test on d = x - y using the raw-sum form
///   t = sum(d) / sqrt((n sum(d^2) - (sum d)^2) / (n - 1)).
/// Throws DimensionError for unequal lengths and TooSmallError for n < 2.
PairedTTestResult paired_t(std::span<const double> x, std::span<const double> y);

// --- effect size -----------------------------------------------------------

enum class Magnitude { kNegligible, kSmall, kMedium, kLarge };

std::string_view magnitude_name(Magnitude m);
/// Cohen's conventional bands: |d| < 0.2 negligible, < 0.5 small, < 0.8 medium, else large.
Magnitude interpret_effect(double d);

struct EffectSize {
  double d = 0.0;
  Magnitude interpretation = Magnitude::kNegligible;
  /// Pooled SD is zero while the means differ: d is +-infinity.
  bool degenerate = false;
};

/// (mean(x) - mean(y)) / pooled SD with n - 1 sample variances.
/// Throws TooSmallError unless both samples hold at least two values.
EffectSize cohens_d(std::span<const double> x, std::span<const double> y);

// --- pairing and comparison ------------------------------------------------

/// `count` distinct indices from [0, population), ascending, chosen uniformly
/// by a generator seeded with `seed`.
std::vector<std::size_t> subsample_indices(std::size_t population, std::size_t count,
                                           std::uint64_t seed);

/// Brings two samples to a common length n = min(|a|, |b|) by subsampling the
/// longer one in order. Equal lengths pass through untouched.
std::pair<std::vector<double>, std::vector<double>> pair_samples(std::span<const double> a,
                                                                 std::span<const double> b,
                                                                 std::uint64_t seed);

struct PairwiseComparison {
  std::string dataset_a;
  std::string dataset_b;
  std::string metric;
  PairedTTestResult ttest;
  EffectSize effect;
};

/// Paired t-test on the paired subsample and Cohen's d on the full samples.
/// Throws UsageError when the metric names differ.
PairwiseComparison compare_pair(const ScoreVector& a, const ScoreVector& b,
                                std::uint64_t seed = kDefaultSeed);

// --- correlation -----------------------------------------------------------

struct Correlation {
  /// nullopt when labels or scores are constant (coefficient undefined).
  std::optional<double> pearson;
  std::optional<double> spearman;
  std::size_t n = 0;
};

std::optional<double> pearson(std::span<const double> x, std::span<const double> y);
/// Pearson on average ranks.
std::optional<double> spearman(std::span<const double> x, std::span<const double> y);
std::vector<double> average_ranks(std::span<const double> values);

/// Correlation between gold labels and scores over the scored records.
Correlation label_score_correlation(const corpus::Dataset& dataset, const ScoreVector& scores);

// --- descriptive ---------------------------------------------------------

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Quantiles interpolate linearly between order statistics. Empty input gives zeros.
Summary summarize(std::span<const double> values);
double quantile(std::vector<double> values, double q);
double median(std::vector<double> values);

}  // namespace simcmp::stats
