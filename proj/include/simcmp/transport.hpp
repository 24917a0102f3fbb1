#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace simcmp::transport {

/// Dense row-major cost matrix for a rows x cols transportation instance.
class CostMatrix {
 public:
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

struct TransportSolution {
  double cost = 0.0;
  /// Optimal plan, same shape as the cost matrix. One of possibly many optima.
  CostMatrix plan{0, 0};
};

/// Exact minimum-cost transportation:
///
///   min sum_ij T_ij c_ij  s.t.  sum_j T_ij = supply_i,  sum_i T_ij = demand_j,  T >= 0
///
/// Solved as min-cost flow by successive shortest paths (Dijkstra on reduced
/// costs). Supplies and demands must be nonnegative with equal totals (within
/// 1e-9 relative); costs must be nonnegative and finite. Throws
/// std::invalid_argument on violated preconditions.
TransportSolution solve_transport(std::span<const double> supply, std::span<const double> demand,
                                  const CostMatrix& cost);

}  // namespace simcmp::transport
