#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "simcmp/stats.hpp"

namespace simcmp::stats {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Continued fraction for I_x(a, b), modified Lentz. Converges fast for
// x < (a + 1) / (a + b + 2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEpsilon = 1e-16;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

// log I_x(a, b) where the caller supplies both x and y = 1 - x, each computed
// without cancellation, plus log(x) and log(y).
double log_incomplete_beta(double a, double b, double x, double y, double log_x, double log_y) {
  if (x <= 0.0) return kNegInf;
  if (y <= 0.0) return 0.0;
  const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double log_front = a * log_x + b * log_y - log_beta;
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return log_front + std::log(beta_continued_fraction(a, b, x)) - std::log(a);
  }
  const double complement = std::exp(log_front + std::log(beta_continued_fraction(b, a, y)) -
                                     std::log(b));
  return std::log1p(-complement);
}

// Arguments of I_x(df/2, 1/2) for the two-tailed t probability, kept accurate
// for both tiny and huge |t|.
struct TailArgs {
  double x, y, log_x, log_y;
};

TailArgs tail_args(double t, double df) {
  if (std::isnan(t)) throw std::invalid_argument("t is NaN");
  if (!(df >= 1.0)) throw std::invalid_argument("degrees of freedom must be at least 1");
  const double t2 = t * t;
  TailArgs args{};
  if (std::isinf(t2)) {
    args.x = 0.0;
    args.y = 1.0;
    args.log_x = std::isinf(t) ? kNegInf : std::log(df) - 2.0 * std::log(std::fabs(t));
    args.log_y = 0.0;
    return args;
  }
  const double denom = df + t2;
  args.x = df / denom;
  args.y = t2 / denom;
  args.log_x = std::log(df) - std::log(denom);
  args.log_y = t2 == 0.0 ? kNegInf : std::log(t2) - std::log(denom);
  return args;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("incomplete beta needs x in [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double y = 1.0 - x;
  return std::exp(log_incomplete_beta(a, b, x, y, std::log(x), std::log1p(-x)));
}

double student_t_p_two_tailed(double t, double df) {
  const auto args = tail_args(t, df);
  if (std::isinf(t)) return 0.0;
  const double p = std::exp(log_incomplete_beta(df / 2.0, 0.5, args.x, args.y, args.log_x,
                                                args.log_y));
  return std::min(1.0, std::max(0.0, p));
}

double student_t_log10_p_two_tailed(double t, double df) {
  const auto args = tail_args(t, df);
  if (std::isinf(t)) return kNegInf;
  if (args.x == 0.0) {
    // |t| so large that x underflows: only the leading term matters.
    const double a = df / 2.0;
    const double log_beta = std::lgamma(a) + std::lgamma(0.5) - std::lgamma(a + 0.5);
    return (a * args.log_x - log_beta - std::log(a)) / std::log(10.0);
  }
  const double log_p =
      log_incomplete_beta(df / 2.0, 0.5, args.x, args.y, args.log_x, args.log_y);
  return std::min(0.0, log_p / std::log(10.0));
}

}  // namespace simcmp::stats
