#include "wnet/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

#include "wnet/error.hpp"

namespace wnet {

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) {
    const double d = x[a] - y[a];
    s += d * d;
  }
  return s;
}

std::vector<double> squared_distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.dim() != nu.dim()) throw Error(ErrorKind::DimensionMismatch, "measures live in different dimensions");
  std::vector<double> c(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    for (std::size_t j = 0; j < nu.size(); ++j) c[i * nu.size() + j] = squared_distance(mu.point(i), nu.point(j));
  }
  return c;
}

double TransportPlan::dual_objective() const {
  double s = 0.0;
  for (std::size_t i = 0; i < rows(); ++i) s += source.weight(i) * dual_u[i];
  for (std::size_t j = 0; j < cols(); ++j) s += target.weight(j) * dual_v[j];
  return s;
}

double TransportPlan::dual_infeasibility() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < rows(); ++i) {
    for (std::size_t j = 0; j < cols(); ++j) {
      worst = std::max(worst, dual_u[i] + dual_v[j] - cost_matrix[i * cols() + j]);
    }
  }
  return worst;
}

namespace {

std::vector<double> build_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost) {
  if (std::holds_alternative<SquaredEuclidean>(cost)) return squared_distance_matrix(mu, nu);
  const auto& m = std::get<ExplicitMatrix>(cost);
  if (m.rows != mu.size() || m.cols != nu.size() || m.values.size() != m.rows * m.cols) {
    throw Error(ErrorKind::DimensionMismatch, "explicit cost matrix shape differs from the supports");
  }
  for (double v : m.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "explicit cost matrix has a non-finite entry");
  }
  return m.values;
}

// Transportation simplex on the complete bipartite graph rows x cols. Tree
// nodes are rows 0..m-1 followed by columns m..m+n-1.
class TransportationSimplex {
 public:
  TransportationSimplex(std::span<const double> a, std::span<const double> b, std::span<const double> cost)
      : m_(a.size()), n_(b.size()), cost_(cost), flow_(m_ * n_, 0.0), basic_(m_ * n_, 0) {
    double cmax = 0.0;
    for (double c : cost_) cmax = std::max(cmax, std::abs(c));
    tol_ = 1e-12 * (1.0 + cmax);
    northwest_corner(a, b);
  }

  void run() {
    std::size_t degenerate_run = 0;
    while (true) {
      compute_potentials();
      const bool bland = degenerate_run >= kDegenerateSwitch;
      std::size_t entering = kNone;
      double best = -tol_;
      for (std::size_t k = 0; k < m_ * n_; ++k) {
        if (basic_[k]) continue;
        const double r = cost_[k] - u_[k / n_] - v_[k % n_];
        if (r < best) {
          best = r;
          entering = k;
          if (bland) break;
        }
      }
      if (entering == kNone) return;
      const double theta = pivot(entering);
      degenerate_run = theta <= 1e-15 ? degenerate_run + 1 : 0;
    }
  }

  const std::vector<double>& flow() const { return flow_; }
  const std::vector<double>& u() const { return u_; }
  const std::vector<double>& v() const { return v_; }

 private:
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  static constexpr std::size_t kDegenerateSwitch = 20;

  void northwest_corner(std::span<const double> a, std::span<const double> b) {
    std::vector<double> ra(a.begin(), a.end()), rb(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    for (std::size_t step = 0; step + 1 < m_ + n_; ++step) {
      const double x = std::max(0.0, std::min(ra[i], rb[j]));
      const std::size_t k = i * n_ + j;
      flow_[k] = x;
      basic_[k] = 1;
      cells_.push_back(k);
      ra[i] -= x;
      rb[j] -= x;
      if (i + 1 == m_) {
        ++j;
      } else if (j + 1 == n_) {
        ++i;
      } else if (ra[i] <= rb[j]) {
        ++i;
      } else {
        ++j;
      }
    }
    // Absorb any rounding imbalance in the last basic cell.
    if (!cells_.empty()) {
      const std::size_t last = cells_.back();
      flow_[last] = std::max(0.0, flow_[last] + std::min(ra[m_ - 1], rb[n_ - 1]));
    }
  }

  void build_adjacency() {
    adj_.assign(m_ + n_, {});
    for (std::size_t k : cells_) {
      const std::size_t r = k / n_, c = m_ + k % n_;
      adj_[r].push_back(k);
      adj_[c].push_back(k);
    }
  }

  std::size_t other_end(std::size_t node, std::size_t cell) const {
    const std::size_t r = cell / n_, c = m_ + cell % n_;
    return node == r ? c : r;
  }

  void compute_potentials() {
    build_adjacency();
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> queue{0};
    seen[0] = 1;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t node = queue[q];
      for (std::size_t cell : adj_[node]) {
        const std::size_t next = other_end(node, cell);
        if (seen[next]) continue;
        seen[next] = 1;
        const std::size_t r = cell / n_, c = cell % n_;
        if (next >= m_) {
          v_[c] = cost_[cell] - u_[r];
        } else {
          u_[r] = cost_[cell] - v_[c];
        }
        queue.push_back(next);
      }
    }
  }

  // Pushes flow around the cycle closed by `entering`; returns the step size.
  double pivot(std::size_t entering) {
    const std::size_t row = entering / n_, col = m_ + entering % n_;
    // Tree path from the entering column back to the entering row.
    std::vector<std::size_t> parent_cell(m_ + n_, kNone);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> queue{row};
    seen[row] = 1;
    for (std::size_t q = 0; q < queue.size() && !seen[col]; ++q) {
      const std::size_t node = queue[q];
      for (std::size_t cell : adj_[node]) {
        const std::size_t next = other_end(node, cell);
        if (seen[next]) continue;
        seen[next] = 1;
        parent_cell[next] = cell;
        queue.push_back(next);
      }
    }
    std::vector<std::size_t> path;  // cells from col back to row; odd positions (0,2,..) lose flow
    for (std::size_t node = col; node != row;) {
      const std::size_t cell = parent_cell[node];
      path.push_back(cell);
      node = other_end(node, cell);
    }

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = kNone;
    for (std::size_t p = 0; p < path.size(); p += 2) {
      const std::size_t cell = path[p];
      const double x = flow_[cell];
      if (x < theta - 1e-15 || (x <= theta + 1e-15 && cell < leaving)) {
        theta = std::min(theta, x);
        leaving = cell;
      }
    }
    theta = std::max(0.0, theta);
    for (std::size_t p = 0; p < path.size(); ++p) {
      double& x = flow_[path[p]];
      x += (p % 2 == 0) ? -theta : theta;
      if (x < 0.0) x = 0.0;
    }
    flow_[entering] = theta;
    flow_[leaving] = 0.0;
    basic_[leaving] = 0;
    basic_[entering] = 1;
    std::replace(cells_.begin(), cells_.end(), leaving, entering);
    return theta;
  }

  std::size_t m_, n_;
  std::span<const double> cost_;
  std::vector<double> flow_;
  std::vector<char> basic_;
  std::vector<std::size_t> cells_;
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<double> u_, v_;
  double tol_ = 0.0;
};

double log_sum_exp(std::span<const double> xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

double safe_log(double w) { return w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity(); }

}  // namespace

TransportPlan solve_ot_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const CostSpec& cost) {
  std::vector<double> c = build_cost(mu, nu, cost);
  TransportationSimplex simplex(mu.weights(), nu.weights(), c);
  simplex.run();

  TransportPlan plan{mu, nu, simplex.flow(), std::move(c), simplex.u(), simplex.v()};
  double total = 0.0;
  for (std::size_t k = 0; k < plan.mass.size(); ++k) total += plan.mass[k] * plan.cost_matrix[k];
  plan.cost_value = total;
  return plan;
}

double w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  // Solve in a fixed orientation so that w2(a, b) and w2(b, a) agree bitwise.
  const auto key = [](const DiscreteMeasure& m) { return std::tie(m.coords(), m.weights()); };
  const bool swap = mu.dim() == nu.dim() && key(nu) < key(mu);
  const TransportPlan p = swap ? solve_ot_exact(nu, mu) : solve_ot_exact(mu, nu);
  return std::sqrt(std::max(0.0, p.cost_value));
}

TransportPlan solve_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const SinkhornOptions& opt) {
  if (!(opt.epsilon > 0.0)) throw Error(ErrorKind::InvalidArgument, "epsilon must be positive");
  const std::size_t m = mu.size(), n = nu.size();
  const std::vector<double> c = squared_distance_matrix(mu, nu);
  const double eps = opt.epsilon;

  std::vector<double> f(m, 0.0), g(n, 0.0), buf(std::max(m, n));
  std::vector<double> best_f, best_g;
  double best_err = std::numeric_limits<double>::infinity();
  bool converged = false;

  auto row_error = [&] {
    double err = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double r = 0.0;
      if (mu.weight(i) > 0.0) {
        for (std::size_t j = 0; j < n; ++j) r += std::exp((f[i] + g[j] - c[i * n + j]) / eps);
      }
      err += std::abs(r - mu.weight(i));
    }
    return err;
  };

  for (std::size_t it = 0; it < opt.max_iter; ++it) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) buf[j] = (g[j] - c[i * n + j]) / eps;
      f[i] = eps * (safe_log(mu.weight(i)) - log_sum_exp({buf.data(), n}));
    }
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t i = 0; i < m; ++i) buf[i] = (f[i] - c[i * n + j]) / eps;
      g[j] = eps * (safe_log(nu.weight(j)) - log_sum_exp({buf.data(), m}));
    }
    const double err = row_error();
    if (err < best_err) {
      best_err = err;
      best_f = f;
      best_g = g;
    }
    if (err <= opt.tol) {
      converged = true;
      break;
    }
  }

  TransportPlan plan{mu, nu, std::vector<double>(m * n), c, best_f, best_g};
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double p = std::exp((best_f[i] + best_g[j] - c[i * n + j]) / eps);
      plan.mass[i * n + j] = std::isfinite(p) ? p : 0.0;
      total += plan.mass[i * n + j] * c[i * n + j];
    }
  }
  // Zero-weight atoms carry -inf potentials; report them as 0 in the duals.
  for (double& x : plan.dual_u) if (!std::isfinite(x)) x = 0.0;
  for (double& x : plan.dual_v) if (!std::isfinite(x)) x = 0.0;
  plan.cost_value = total;
  plan.converged = converged;
  plan.marginal_error = best_err;
  return plan;
}

DiscreteMeasure merge_coincident(std::size_t dim, std::span<const double> coords,
                                 std::span<const double> weights, double tol) {
  std::vector<std::size_t> order;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] > kAtomCutoff) order.push_back(k);
  }
  if (order.empty()) throw Error(ErrorKind::InvalidMeasure, "no positive mass to merge");
  auto pt = [&](std::size_t k) { return coords.subspan(k * dim, dim); };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::lexicographical_compare(pt(x).begin(), pt(x).end(), pt(y).begin(), pt(y).end());
  });

  std::vector<double> out_c, out_w;
  std::vector<bool> used(order.size(), false);
  for (std::size_t s = 0; s < order.size(); ++s) {
    if (used[s]) continue;
    const auto p = pt(order[s]);
    double w = weights[order[s]];
    // Lexicographic order puts near-duplicates within the leading-coordinate window.
    for (std::size_t t = s + 1; t < order.size() && pt(order[t])[0] <= p[0] + tol; ++t) {
      if (used[t]) continue;
      const auto q = pt(order[t]);
      bool same = true;
      for (std::size_t a = 0; a < dim; ++a) same = same && std::abs(p[a] - q[a]) <= tol;
      if (same) {
        w += weights[order[t]];
        used[t] = true;
      }
    }
    out_c.insert(out_c.end(), p.begin(), p.end());
    out_w.push_back(w);
  }
  return DiscreteMeasure::normalized(dim, std::move(out_c), std::move(out_w));
}

DiscreteMeasure displacement_interpolate(const TransportPlan& plan, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorKind::InvalidArgument, "interpolation parameter outside [0,1]");
  const std::size_t dim = plan.source.dim();
  std::vector<double> coords, weights;
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      const double w = plan.at(i, j);
      if (w <= 0.0) continue;
      const auto x = plan.source.point(i);
      const auto y = plan.target.point(j);
      for (std::size_t a = 0; a < dim; ++a) coords.push_back((1.0 - t) * x[a] + t * y[a]);
      weights.push_back(w);
    }
  }
  return merge_coincident(dim, coords, weights);
}

std::vector<double> barycentric_map(const TransportPlan& plan) {
  const std::size_t dim = plan.target.dim();
  std::vector<double> image(plan.rows() * dim, 0.0);
  for (std::size_t i = 0; i < plan.rows(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < plan.cols(); ++j) {
      const double w = plan.at(i, j);
      row += w;
      const auto y = plan.target.point(j);
      for (std::size_t a = 0; a < dim; ++a) image[i * dim + a] += w * y[a];
    }
    if (!(row > 0.0)) throw Error(ErrorKind::InvalidArgument, "source point carries no transported mass");
    for (std::size_t a = 0; a < dim; ++a) image[i * dim + a] /= row;
  }
  return image;
}

}  // namespace wnet
