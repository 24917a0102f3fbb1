#include <random>
#include <stdexcept>

#include <doctest.h>

#include "oracles.hpp"
#include "simcmp/transport.hpp"

using simcmp::transport::CostMatrix;
using simcmp::transport::solve_transport;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::vector<double> v(n);
  double total = 0.0;
  for (auto& x : v) total += (x = u(rng));
  for (auto& x : v) x /= total;
  return v;
}

}  // namespace

TEST_CASE("point masses cost the ground distance") {
  CostMatrix c(1, 1, 5.0);
  std::vector<double> s{1.0}, d{1.0};
  const auto sol = solve_transport(s, d, c);
  CHECK(sol.cost == doctest::Approx(5.0));
  CHECK(sol.plan(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("forced plan when one side is a point mass") {
  CostMatrix c(2, 1);
  c(0, 0) = 3.0;
  c(1, 0) = 7.0;
  std::vector<double> s{0.5, 0.5}, d{1.0};
  CHECK(solve_transport(s, d, c).cost == doctest::Approx(5.0));
}

TEST_CASE("diagonal identity has zero cost") {
  CostMatrix c(3, 3, 1.0);
  for (int i = 0; i < 3; ++i) c(i, i) = 0.0;
  std::vector<double> w{0.2, 0.3, 0.5};
  CHECK(solve_transport(w, w, c).cost == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("known 2x2 instance") {
  // Cheapest: ship 0.4 on (0,0) and 0.6 split: row 0 supply 0.5 -> (0,0)=0.4,(0,1)=0.1;
  // row 1 -> (1,1)=0.5. cost = 0.4*1 + 0.1*4 + 0.5*1 = 1.3
  CostMatrix c(2, 2);
  c(0, 0) = 1; c(0, 1) = 4; c(1, 0) = 3; c(1, 1) = 1;
  std::vector<double> s{0.5, 0.5}, d{0.4, 0.6};
  const auto sol = solve_transport(s, d, c);
  CHECK(sol.cost == doctest::Approx(1.3));
  CHECK(sol.plan(0, 0) == doctest::Approx(0.4));
  CHECK(sol.plan(1, 1) == doctest::Approx(0.5));
}

TEST_CASE("plan satisfies the marginals") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng() % 12;
    const std::size_t n = 1 + rng() % 12;
    auto s = random_simplex(rng, m);
    auto d = random_simplex(rng, n);
    CostMatrix c(m, n);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = u(rng);
    const auto sol = solve_transport(s, d, c);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(sol.plan(i, j) >= -1e-15);
        row += sol.plan(i, j);
        total += sol.plan(i, j) * c(i, j);
      }
      CHECK(row == doctest::Approx(s[i]).epsilon(1e-12));
    }
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < m; ++i) col += sol.plan(i, j);
      CHECK(col == doctest::Approx(d[j]).epsilon(1e-12));
    }
    CHECK(total == doctest::Approx(sol.cost).epsilon(1e-12));
  }
}

TEST_CASE("matches brute-force vertex enumeration on small instances") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng() % 3;
    const std::size_t n = 1 + rng() % 3;
    auto s = random_simplex(rng, m);
    auto d = random_simplex(rng, n);
    CostMatrix c(m, n);
    std::vector<std::vector<double>> cv(m, std::vector<double>(n));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) cv[i][j] = c(i, j) = u(rng);
    const double expected = oracle::brute_force_transport(s, d, cv);
    CHECK(solve_transport(s, d, c).cost == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("degenerate marginals with zero entries") {
  CostMatrix c(3, 2);
  c(0, 0) = 2; c(0, 1) = 1; c(1, 0) = 5; c(1, 1) = 0; c(2, 0) = 1; c(2, 1) = 3;
  std::vector<double> s{0.5, 0.0, 0.5}, d{0.5, 0.5};
  std::vector<std::vector<double>> cv{{2, 1}, {5, 0}, {1, 3}};
  CHECK(solve_transport(s, d, c).cost ==
        doctest::Approx(oracle::brute_force_transport(s, d, cv)));
}

TEST_CASE("precondition violations") {
  CostMatrix c(1, 1, 1.0);
  std::vector<double> one{1.0}, half{0.5}, neg{-1.0};
  CHECK_THROWS_AS(solve_transport(one, half, c), std::invalid_argument);
  CHECK_THROWS_AS(solve_transport(neg, neg, c), std::invalid_argument);
  CostMatrix bad(1, 1, -1.0);
  CHECK_THROWS_AS(solve_transport(one, one, bad), std::invalid_argument);
  CostMatrix wrong(2, 1, 1.0);
  CHECK_THROWS_AS(solve_transport(one, one, wrong), std::invalid_argument);
}
