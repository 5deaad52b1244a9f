#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace wnet::lp {

/// Compressed sparse column storage for the constraint matrix.
class SparseColumns {
 public:
  explicit SparseColumns(std::size_t rows) : rows_(rows) {}

  void add_column(std::span<const std::pair<std::size_t, double>> entries);
  void reserve(std::size_t columns, std::size_t nonzeros);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return start_.size() - 1; }
  std::span<const std::size_t> row_indices(std::size_t j) const {
    return {index_.data() + start_[j], start_[j + 1] - start_[j]};
  }
  std::span<const double> values(std::size_t j) const {
    return {value_.data() + start_[j], start_[j + 1] - start_[j]};
  }

 private:
  std::size_t rows_;
  std::vector<std::size_t> start_{0};
  std::vector<std::size_t> index_;
  std::vector<double> value_;
};

/// min c^T x  subject to  A x = b, x >= 0.
struct Problem {
  SparseColumns a;
  std::vector<double> b;
  std::vector<double> c;
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit };

struct Solution {
  Status status = Status::IterationLimit;
  std::vector<double> x;  // primal, one per column
  std::vector<double> y;  // duals, one per row
  double objective = 0.0;
  double dual_objective = 0.0;
  /// max(0, max_j -(c_j - y^T A_j)); zero certifies dual feasibility.
  double dual_infeasibility = 0.0;
  std::size_t iterations = 0;
};

struct Options {
  std::size_t max_iterations = 2'000'000;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-12;
  double pivot_tol = 1e-9;
  std::size_t refactor_every = 50;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_switch = 30;
};

/// Two-phase revised simplex with a dense basis inverse. Pricing is Dantzig's
/// rule, falling back to Bland's rule on degenerate stalls; the solve is
/// deterministic for a given input. Redundant equality rows are tolerated.
Solution solve(const Problem& problem, const Options& options = {});

}  // namespace wnet::lp
