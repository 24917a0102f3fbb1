#include "simcmp/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace simcmp::transport {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Residual network of the bipartite instance plus a super source and sink.
// Node layout: sources [0, m), sinks [m, m + n), source S = m + n, sink T = S + 1.
// Arcs: S->i (capacity = remaining supply), i->j (uncapacitated, cost c_ij),
// j->i (capacity = flow on i->j, cost -c_ij), j->T (capacity = remaining demand).
class SuccessiveShortestPaths {
 public:
  SuccessiveShortestPaths(std::span<const double> supply, std::span<const double> demand,
                          const CostMatrix& cost, double eps)
      : m_(supply.size()),
        n_(demand.size()),
        cost_(cost),
        supply_left_(supply.begin(), supply.end()),
        demand_left_(demand.begin(), demand.end()),
        flow_(m_, n_, 0.0),
        eps_(eps),
        potential_(m_ + n_ + 2, 0.0),
        dist_(m_ + n_ + 2),
        parent_(m_ + n_ + 2),
        done_(m_ + n_ + 2) {}

  CostMatrix run() {
    const std::size_t max_augmentations = 64 * (m_ + n_ + 2) * (m_ + n_ + 2) + 64;
    for (std::size_t round = 0; round < max_augmentations; ++round) {
      if (!shortest_path()) return flow_;
      augment();
    }
    throw std::runtime_error("transport solver did not converge");
  }

 private:
  std::size_t source() const { return m_ + n_; }
  std::size_t sink() const { return m_ + n_ + 1; }

  void relax(std::size_t from, std::size_t to, double arc_cost) {
    const double reduced = std::max(0.0, arc_cost + potential_[from] - potential_[to]);
    const double candidate = dist_[from] + reduced;
    if (candidate < dist_[to]) {
      dist_[to] = candidate;
      parent_[to] = from;
    }
  }

  // Dense Dijkstra from S on reduced costs. Returns false when T is unreachable.
  bool shortest_path() {
    const std::size_t nodes = m_ + n_ + 2;
    std::fill(dist_.begin(), dist_.end(), kInf);
    std::fill(done_.begin(), done_.end(), false);
    dist_[source()] = 0.0;
    for (std::size_t step = 0; step < nodes; ++step) {
      std::size_t u = nodes;
      double best = kInf;
      for (std::size_t v = 0; v < nodes; ++v) {
        if (!done_[v] && dist_[v] < best) {
          best = dist_[v];
          u = v;
        }
      }
      if (u == nodes) break;
      done_[u] = true;
      if (u == sink()) break;
      if (u == source()) {
        for (std::size_t i = 0; i < m_; ++i) {
          if (supply_left_[i] > eps_) relax(u, i, 0.0);
        }
      } else if (u < m_) {
        for (std::size_t j = 0; j < n_; ++j) relax(u, m_ + j, cost_(u, j));
      } else {
        const std::size_t j = u - m_;
        for (std::size_t i = 0; i < m_; ++i) {
          if (flow_(i, j) > eps_) relax(u, i, -cost_(i, j));
        }
        if (demand_left_[j] > eps_) relax(u, sink(), 0.0);
      }
    }
    if (dist_[sink()] == kInf) return false;
    const double cap = dist_[sink()];
    for (std::size_t v = 0; v < nodes; ++v) potential_[v] += std::min(dist_[v], cap);
    return true;
  }

  void augment() {
    // Walk T <- j <- ... <- i <- S to find the bottleneck.
    double delta = kInf;
    for (std::size_t v = sink(); v != source(); v = parent_[v]) {
      const std::size_t u = parent_[v];
      if (v == sink()) {
        delta = std::min(delta, demand_left_[u - m_]);
      } else if (u == source()) {
        delta = std::min(delta, supply_left_[v]);
      } else if (u >= m_) {  // backward arc sink u -> source v
        delta = std::min(delta, flow_(v, u - m_));
      }
    }
    for (std::size_t v = sink(); v != source(); v = parent_[v]) {
      const std::size_t u = parent_[v];
      if (v == sink()) {
        demand_left_[u - m_] -= delta;
      } else if (u == source()) {
        supply_left_[v] -= delta;
      } else if (u < m_) {
        flow_(u, v - m_) += delta;
      } else {
        flow_(v, u - m_) -= delta;
      }
    }
  }

  std::size_t m_;
  std::size_t n_;
  const CostMatrix& cost_;
  std::vector<double> supply_left_;
  std::vector<double> demand_left_;
  CostMatrix flow_;
  double eps_;
  std::vector<double> potential_;
  std::vector<double> dist_;
  std::vector<std::size_t> parent_;
  std::vector<bool> done_;
};

}  // namespace

TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const CostMatrix& cost) {
  if (cost.rows() != supply.size() || cost.cols() != demand.size()) {
    throw std::invalid_argument("cost matrix shape does not match the marginals");
  }
  auto check_marginal = [](std::span<const double> values, const char* what) {
    for (double v : values) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
      }
    }
  };
  check_marginal(supply, "supply");
  check_marginal(demand, "demand");
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      if (!std::isfinite(cost(i, j)) || cost(i, j) < 0.0) {
        throw std::invalid_argument("costs must be finite and nonnegative");
      }
    }
  }
  const double total_supply = std::accumulate(supply.begin(), supply.end(), 0.0);
  const double total_demand = std::accumulate(demand.begin(), demand.end(), 0.0);
  const double scale = std::max({total_supply, total_demand, 1e-300});
  if (std::abs(total_supply - total_demand) > 1e-9 * scale) {
    throw std::invalid_argument("supply and demand totals differ");
  }

  TransportSolution solution;
  if (supply.empty() || demand.empty() || total_supply == 0.0) {
    solution.plan = CostMatrix(supply.size(), demand.size(), 0.0);
    return solution;
  }
  SuccessiveShortestPaths solver(supply, demand, cost, 1e-15 * scale);
  solution.plan = solver.run();
  for (std::size_t i = 0; i < cost.rows(); ++i) {
    for (std::size_t j = 0; j < cost.cols(); ++j) {
      solution.cost += solution.plan(i, j) * cost(i, j);
    }
  }
  return solution;
}

}  // namespace simcmp::transport
