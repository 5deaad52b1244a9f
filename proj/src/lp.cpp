#include "wnet/lp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "wnet/error.hpp"

namespace wnet::lp {

void SparseColumns::add_column(std::span<const std::pair<std::size_t, double>> entries) {
  for (const auto& [row, val] : entries) {
    if (row >= rows_) throw Error(ErrorKind::InvalidArgument, "LP column entry outside the row range");
    index_.push_back(row);
    value_.push_back(val);
  }
  start_.push_back(index_.size());
}

void SparseColumns::reserve(std::size_t columns, std::size_t nonzeros) {
  start_.reserve(columns + 1);
  index_.reserve(nonzeros);
  value_.reserve(nonzeros);
}

namespace {

class RevisedSimplex {
 public:
  RevisedSimplex(const Problem& p, const Options& opt)
      : p_(p), opt_(opt), m_(p.a.rows()), n_(p.a.cols()), sign_(m_, 1.0), b_(m_),
        binv_(Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_))),
        xb_(static_cast<Eigen::Index>(m_)), basis_(m_), is_basic_(n_ + m_, 0) {
    if (p.b.size() != m_ || p.c.size() != n_) {
      throw Error(ErrorKind::InvalidArgument, "LP dimensions are inconsistent");
    }
    for (std::size_t r = 0; r < m_; ++r) {
      if (p.b[r] < 0.0) sign_[r] = -1.0;
      b_[r] = sign_[r] * p.b[r];
      xb_[idx(r)] = b_[r];
      basis_[r] = n_ + r;
      is_basic_[n_ + r] = 1;
    }
    double cmax = 0.0;
    for (double c : p.c) cmax = std::max(cmax, std::abs(c));
    cost_scale_ = 1.0 + cmax;
  }

  Solution run() {
    Solution sol;
    Status st = iterate(/*phase_one=*/true, sol.iterations);
    if (st == Status::IterationLimit) return finish(sol, st);

    double infeasibility = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] >= n_) infeasibility += std::max(0.0, xb_[idx(r)]);
    }
    double bnorm = 0.0;
    for (double v : b_) bnorm += std::abs(v);
    if (infeasibility > opt_.feasibility_tol * (1.0 + bnorm)) return finish(sol, Status::Infeasible);

    drive_out_artificials();
    st = iterate(/*phase_one=*/false, sol.iterations);
    return finish(sol, st);
  }

 private:
  static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

  double cost(std::size_t j, bool phase_one) const {
    if (phase_one) return j >= n_ ? 1.0 : 0.0;
    return j < n_ ? p_.c[j] : 0.0;
  }

  template <class Fn>
  void for_each_entry(std::size_t j, Fn&& fn) const {
    if (j >= n_) {
      fn(j - n_, 1.0);
      return;
    }
    const auto rows = p_.a.row_indices(j);
    const auto vals = p_.a.values(j);
    for (std::size_t k = 0; k < rows.size(); ++k) fn(rows[k], sign_[rows[k]] * vals[k]);
  }

  Eigen::VectorXd column_image(std::size_t j) const {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(idx(m_));
    for_each_entry(j, [&](std::size_t row, double v) { alpha += v * binv_.col(idx(row)); });
    return alpha;
  }

  Eigen::VectorXd duals(bool phase_one) const {
    Eigen::VectorXd cb(idx(m_));
    for (std::size_t r = 0; r < m_; ++r) cb[idx(r)] = cost(basis_[r], phase_one);
    return binv_.transpose() * cb;
  }

  double reduced_cost(std::size_t j, const Eigen::VectorXd& y, bool phase_one) const {
    double d = cost(j, phase_one);
    for_each_entry(j, [&](std::size_t row, double v) { d -= y[idx(row)] * v; });
    return d;
  }

  void pivot(std::size_t row, std::size_t entering, const Eigen::VectorXd& alpha, double theta) {
    xb_ -= theta * alpha;
    xb_[idx(row)] = theta;
    const double piv = alpha[idx(row)];
    binv_.row(idx(row)) /= piv;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == row || alpha[idx(i)] == 0.0) continue;
      binv_.row(idx(i)) -= alpha[idx(i)] * binv_.row(idx(row));
    }
    is_basic_[basis_[row]] = 0;
    basis_[row] = entering;
    is_basic_[entering] = 1;
    if (++since_refactor_ >= opt_.refactor_every) refactor();
  }

  void refactor() {
    since_refactor_ = 0;
    Eigen::MatrixXd basis_matrix = Eigen::MatrixXd::Zero(idx(m_), idx(m_));
    for (std::size_t r = 0; r < m_; ++r) {
      for_each_entry(basis_[r], [&](std::size_t row, double v) { basis_matrix(idx(row), idx(r)) = v; });
    }
    binv_ = basis_matrix.partialPivLu().inverse();
    Eigen::VectorXd b(idx(m_));
    for (std::size_t r = 0; r < m_; ++r) b[idx(r)] = b_[r];
    xb_ = binv_ * b;
    for (std::size_t r = 0; r < m_; ++r) {
      if (std::abs(xb_[idx(r)]) < 1e-15) xb_[idx(r)] = 0.0;
    }
  }

  Status iterate(bool phase_one, std::size_t& iterations) {
    std::size_t degenerate_run = 0;
    const double tol = opt_.optimality_tol * (phase_one ? 1.0 : cost_scale_);
    while (true) {
      if (iterations >= opt_.max_iterations) return Status::IterationLimit;
      const Eigen::VectorXd y = duals(phase_one);
      const bool bland = degenerate_run >= opt_.degenerate_switch;

      std::size_t entering = n_;
      double best = -tol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic_[j]) continue;
        const double d = reduced_cost(j, y, phase_one);
        if (d < best) {
          entering = j;
          best = d;
          if (bland) break;
        }
      }
      if (entering == n_) return Status::Optimal;

      const Eigen::VectorXd alpha = column_image(entering);
      std::size_t leave = m_;
      double theta = kInfinity;
      for (std::size_t r = 0; r < m_; ++r) {
        const double a = alpha[idx(r)];
        double ratio;
        if (basis_[r] >= n_ && !phase_one && std::abs(a) > opt_.pivot_tol) {
          ratio = 0.0;  // stranded artificial must leave before it could grow
        } else if (a > opt_.pivot_tol) {
          ratio = std::max(0.0, xb_[idx(r)]) / a;
        } else {
          continue;
        }
        bool take = false;
        if (leave == m_ || ratio < theta - 1e-14) {
          take = true;
        } else if (ratio <= theta + 1e-14) {
          take = bland ? basis_[r] < basis_[leave] : std::abs(a) > std::abs(alpha[idx(leave)]);
        }
        if (take) {
          leave = r;
          theta = std::min(theta, ratio);
        }
      }
      if (leave == m_) return Status::Unbounded;
      if (basis_[leave] >= n_ && !phase_one) theta = 0.0;

      degenerate_run = theta <= 1e-14 ? degenerate_run + 1 : 0;
      pivot(leave, entering, alpha, theta);
      ++iterations;
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      std::size_t best_j = n_;
      double best_v = opt_.pivot_tol;
      for (std::size_t j = 0; j < n_; ++j) {
        if (is_basic_[j]) continue;
        double v = 0.0;
        for_each_entry(j, [&](std::size_t row, double a) { v += binv_(idx(r), idx(row)) * a; });
        if (std::abs(v) > best_v) {
          best_v = std::abs(v);
          best_j = j;
        }
      }
      // No candidate means the row is redundant; the artificial stays basic at zero.
      if (best_j == n_) continue;
      xb_[idx(r)] = 0.0;
      pivot(r, best_j, column_image(best_j), 0.0);
    }
  }

  Solution& finish(Solution& sol, Status st) {
    sol.status = st;
    sol.x.assign(n_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) sol.x[basis_[r]] = std::max(0.0, xb_[idx(r)]);
    }
    const Eigen::VectorXd y = duals(false);
    sol.y.resize(m_);
    for (std::size_t r = 0; r < m_; ++r) sol.y[r] = sign_[r] * y[idx(r)];
    sol.objective = 0.0;
    for (std::size_t j = 0; j < n_; ++j) sol.objective += p_.c[j] * sol.x[j];
    sol.dual_objective = 0.0;
    for (std::size_t r = 0; r < m_; ++r) sol.dual_objective += p_.b[r] * sol.y[r];
    sol.dual_infeasibility = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      sol.dual_infeasibility = std::max(sol.dual_infeasibility, -reduced_cost(j, y, false));
    }
    return sol;
  }

  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  const Problem& p_;
  const Options& opt_;
  std::size_t m_, n_;
  std::vector<double> sign_, b_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  std::vector<std::size_t> basis_;
  std::vector<char> is_basic_;
  double cost_scale_ = 1.0;
  std::size_t since_refactor_ = 0;
};

}  // namespace

Solution solve(const Problem& problem, const Options& options) {
  if (problem.a.rows() == 0) {
    Solution sol;
    sol.status = Status::Optimal;
    sol.x.assign(problem.a.cols(), 0.0);
    return sol;
  }
  return RevisedSimplex(problem, options).run();
}

}  // namespace wnet::lp
