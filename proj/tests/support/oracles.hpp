#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the solver paths they are compared against.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "wnet/measures.hpp"

namespace oracle {

inline double sq(double x) { return x * x; }

inline double dist2(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += sq(a[i] - b[i]);
  return s;
}

/// Minimum transport cost by enumerating every basic solution of the
/// transportation polytope: spanning trees of the bipartite support graph,
/// solved by leaf peeling and kept when nonnegative.
class TransportEnumerator {
 public:
  TransportEnumerator(std::vector<double> a, std::vector<double> b, std::vector<double> cost)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(cost)), m_(a_.size()), n_(b_.size()) {
    parent_.resize(m_ + n_);
    rank_.assign(m_ + n_, 0);
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  double minimum() {
    best_ = std::numeric_limits<double>::infinity();
    chosen_.clear();
    recurse(0);
    return best_;
  }

  std::size_t trees_visited() const { return trees_; }

 private:
  std::size_t find(std::size_t x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  void recurse(std::size_t cell) {
    const std::size_t need = m_ + n_ - 1;
    if (chosen_.size() == need) {
      ++trees_;
      evaluate();
      return;
    }
    const std::size_t total = m_ * n_;
    if (cell >= total || chosen_.size() + (total - cell) < need) return;
    const std::size_t r = find(cell / n_), s = find(m_ + cell % n_);
    if (r != s) {
      // union by rank with an undo record
      std::size_t child = r, root = s;
      if (rank_[r] > rank_[s]) std::swap(child, root);
      const bool bumped = rank_[child] == rank_[root];
      parent_[child] = root;
      if (bumped) ++rank_[root];
      chosen_.push_back(cell);
      recurse(cell + 1);
      chosen_.pop_back();
      parent_[child] = child;
      if (bumped) --rank_[root];
    }
    recurse(cell + 1);
  }

  void evaluate() {
    std::vector<double> ra = a_, rb = b_;
    std::vector<int> degree(m_ + n_, 0);
    std::vector<char> done(chosen_.size(), 0);
    for (std::size_t cell : chosen_) {
      ++degree[cell / n_];
      ++degree[m_ + cell % n_];
    }
    double cost = 0.0;
    for (std::size_t round = 0; round < chosen_.size(); ++round) {
      bool progressed = false;
      for (std::size_t k = 0; k < chosen_.size(); ++k) {
        if (done[k]) continue;
        const std::size_t i = chosen_[k] / n_, j = chosen_[k] % n_;
        double x;
        if (degree[i] == 1) {
          x = ra[i];
        } else if (degree[m_ + j] == 1) {
          x = rb[j];
        } else {
          continue;
        }
        if (x < -1e-12) return;
        ra[i] -= x;
        rb[j] -= x;
        --degree[i];
        --degree[m_ + j];
        done[k] = 1;
        cost += x * c_[chosen_[k]];
        progressed = true;
        break;
      }
      if (!progressed) return;
    }
    for (double r : ra)
      if (std::abs(r) > 1e-9) return;
    for (double r : rb)
      if (std::abs(r) > 1e-9) return;
    best_ = std::min(best_, cost);
  }

  std::vector<double> a_, b_, c_;
  std::size_t m_, n_;
  std::vector<std::size_t> parent_, rank_;
  std::vector<std::size_t> chosen_;
  double best_ = 0.0;
  std::size_t trees_ = 0;
};

inline double ot_cost_by_enumeration(const wnet::DiscreteMeasure& mu, const wnet::DiscreteMeasure& nu) {
  std::vector<double> cost(mu.size() * nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      cost[i * nu.size() + j] = dist2(mu.point(i).data(), nu.point(j).data(), mu.dim());
  return TransportEnumerator(mu.weights(), nu.weights(), std::move(cost)).minimum();
}

/// Minimum matching cost over all permutations (uniform n-point measures).
inline double birkhoff_minimum(const wnet::DiscreteMeasure& mu, const wnet::DiscreteMeasure& nu) {
  std::vector<std::size_t> perm(mu.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < perm.size(); ++i) s += dist2(mu.point(i).data(), nu.point(perm[i]).data(), mu.dim());
    best = std::min(best, s / static_cast<double>(perm.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Quantile function of a 1D discrete measure, as (cumulative level, point) steps.
struct Quantile {
  std::vector<double> levels;  // right ends, last = 1
  std::vector<double> points;
  double at(double u) const {
    auto it = std::lower_bound(levels.begin(), levels.end(), u);
    if (it == levels.end()) --it;
    return points[static_cast<std::size_t>(it - levels.begin())];
  }
};

inline Quantile quantile(const wnet::DiscreteMeasure& mu) {
  std::vector<std::size_t> order(mu.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return mu.point(x)[0] < mu.point(y)[0]; });
  Quantile q;
  double acc = 0.0;
  for (std::size_t i : order) {
    acc += mu.weight(i);
    q.levels.push_back(acc);
    q.points.push_back(mu.point(i)[0]);
  }
  q.levels.back() = 1.0;
  return q;
}

/// All breakpoints of a family of quantile functions, sorted, starting at 0.
inline std::vector<double> merged_levels(const std::vector<Quantile>& qs) {
  std::vector<double> u{0.0};
  for (const auto& q : qs) u.insert(u.end(), q.levels.begin(), q.levels.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end(), [](double x, double y) { return std::abs(x - y) < 1e-15; }), u.end());
  return u;
}

/// W2^2 on the line by monotone rearrangement.
inline double w2_squared_1d(const wnet::DiscreteMeasure& mu, const wnet::DiscreteMeasure& nu) {
  const std::vector<Quantile> qs{quantile(mu), quantile(nu)};
  const auto u = merged_levels(qs);
  double s = 0.0;
  for (std::size_t k = 1; k < u.size(); ++k) {
    const double mid = 0.5 * (u[k - 1] + u[k]);
    s += (u[k] - u[k - 1]) * sq(qs[0].at(mid) - qs[1].at(mid));
  }
  return s;
}

struct Barycenter1D {
  std::vector<double> points, weights;
  double psi = 0.0;
};

/// Weighted barycenter on the line: its quantile function is the
/// sigma-weighted mean of the marginals' quantile functions.
inline Barycenter1D barycenter_1d(const std::vector<wnet::DiscreteMeasure>& mus, const std::vector<double>& sigma) {
  std::vector<Quantile> qs;
  for (const auto& m : mus) qs.push_back(quantile(m));
  const auto u = merged_levels(qs);
  const double total = std::accumulate(sigma.begin(), sigma.end(), 0.0);
  Barycenter1D out;
  for (std::size_t k = 1; k < u.size(); ++k) {
    const double mid = 0.5 * (u[k - 1] + u[k]), du = u[k] - u[k - 1];
    double y = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) y += sigma[i] * qs[i].at(mid);
    y /= total;
    for (std::size_t i = 0; i < qs.size(); ++i) out.psi += du * sigma[i] * sq(qs[i].at(mid) - y);
    out.points.push_back(y);
    out.weights.push_back(du);
  }
  return out;
}

/// argmin over a dense grid of y in [lo, hi] of f(y).
inline double scan_minimum(const std::function<double(double)>& f, double lo, double hi, std::size_t steps) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s <= steps; ++s) best = std::min(best, f(lo + (hi - lo) * static_cast<double>(s) / steps));
  return best;
}

/// Central difference of f at x along coordinate k.
inline double central_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                 std::size_t k, double h) {
  x[k] += h;
  const double fp = f(x);
  x[k] -= 2 * h;
  const double fm = f(x);
  return (fp - fm) / (2 * h);
}

/// Mixed second central difference d^2 f / dx_k dx_l.
inline double second_difference(const std::function<double(const std::vector<double>&)>& f, std::vector<double> x,
                                std::size_t k, std::size_t l, double h) {
  auto eval = [&](double dk, double dl) {
    auto y = x;
    y[k] += dk;
    y[l] += dl;
    return f(y);
  };
  return (eval(h, h) - eval(h, -h) - eval(-h, h) + eval(-h, -h)) / (4 * h * h);
}

/// Minimum spanning length by brute force over all labeled trees (Pruefer codes).
inline double brute_force_mst(const std::vector<std::vector<double>>& d) {
  const std::size_t n = d.size();
  if (n == 1) return 0.0;
  if (n == 2) return d[0][1];
  std::vector<std::size_t> code(n - 2, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::size_t> degree(n, 1);
    for (std::size_t c : code) ++degree[c];
    double length = 0.0;
    for (std::size_t c : code) {
      std::size_t leaf = 0;
      while (degree[leaf] != 1) ++leaf;
      length += d[leaf][c];
      --degree[leaf];
      --degree[c];
    }
    std::size_t u = n, v = n;
    for (std::size_t x = 0; x < n; ++x) {
      if (degree[x] == 1) (u == n ? u : v) = x;
    }
    length += d[u][v];
    best = std::min(best, length);
    std::size_t pos = 0;
    while (pos < code.size() && ++code[pos] == n) code[pos++] = 0;
    if (pos == code.size()) break;
  }
  return best;
}

/// Euclidean Steiner minimum for k <= 4 points. For each full topology the
/// length is convex in the Steiner points, so a smoothed Newton iteration with
/// shrinking smoothing reaches the minimum; Steiner points may coincide with
/// terminals, which covers every degenerate topology as a limit.
class EuclideanSteiner {
 public:
  using Point = std::vector<double>;

  static double length(const std::vector<Point>& terminals) {
    const std::size_t k = terminals.size();
    if (k == 1) return 0.0;
    if (k == 2) return std::sqrt(dist2(terminals[0].data(), terminals[1].data(), terminals[0].size()));
    if (k == 3) return solve(terminals, {{0, 3}, {1, 3}, {2, 3}}, 1).first;
    double best = std::numeric_limits<double>::infinity();
    const std::array<std::array<std::size_t, 4>, 3> pairings{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
    for (const auto& p : pairings) {
      best = std::min(best, solve(terminals, {{p[0], 4}, {p[1], 4}, {4, 5}, {p[2], 5}, {p[3], 5}}, 2).first);
    }
    return best;
  }

  /// Fermat point of three terminals.
  static Point fermat_point(const std::vector<Point>& terminals) {
    return solve(terminals, {{0, 3}, {1, 3}, {2, 3}}, 1).second;
  }

 private:
  // Vertices: terminals 0..k-1, then Steiner points.
  static std::pair<double, Point> solve(const std::vector<Point>& terminals,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                        std::size_t steiner) {
    const std::size_t k = terminals.size(), n = terminals[0].size(), dof = steiner * n;
    Point centroid(n, 0.0);
    for (const auto& t : terminals)
      for (std::size_t a = 0; a < n; ++a) centroid[a] += t[a] / static_cast<double>(k);
    Point y;
    for (std::size_t s = 0; s < steiner; ++s) y.insert(y.end(), centroid.begin(), centroid.end());

    auto position = [&](const Point& z, std::size_t v) -> const double* {
      return v < k ? terminals[v].data() : z.data() + (v - k) * n;
    };
    auto value = [&](const Point& z, double eps) {
      double s = 0.0;
      for (auto [u, v] : edges) s += std::sqrt(dist2(position(z, u), position(z, v), n) + eps * eps);
      return s;
    };

    for (double eps = 1e-1; eps > 1e-11; eps *= 0.1) {
      for (int it = 0; it < 200; ++it) {
        std::vector<double> g(dof, 0.0), h(dof * dof, 0.0);
        for (auto [u, v] : edges) {
          const double* pu = position(y, u);
          const double* pv = position(y, v);
          std::vector<double> d(n);
          for (std::size_t a = 0; a < n; ++a) d[a] = pu[a] - pv[a];
          const double r = std::sqrt(dist2(pu, pv, n) + eps * eps);
          // gradient d/r and Hessian (I - d d^T / r^2) / r with signs per endpoint
          const long su = u < k ? -1 : static_cast<long>(u - k), sv = v < k ? -1 : static_cast<long>(v - k);
          for (std::size_t a = 0; a < n; ++a) {
            if (su >= 0) g[su * n + a] += d[a] / r;
            if (sv >= 0) g[sv * n + a] -= d[a] / r;
          }
          for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
              const double hab = ((a == b ? 1.0 : 0.0) - d[a] * d[b] / (r * r)) / r;
              auto add = [&](long p, long q, double sign) {
                if (p >= 0 && q >= 0) h[(p * n + a) * dof + q * n + b] += sign * hab;
              };
              add(su, su, 1);
              add(sv, sv, 1);
              add(su, sv, -1);
              add(sv, su, -1);
            }
          }
        }
        const Point step = solve_dense(h, g, dof);
        double t = 1.0;
        const double f0 = value(y, eps);
        Point trial(dof);
        while (true) {
          for (std::size_t q = 0; q < dof; ++q) trial[q] = y[q] - t * step[q];
          if (value(trial, eps) <= f0 || t < 1e-12) break;
          t *= 0.5;
        }
        double moved = 0.0;
        for (std::size_t q = 0; q < dof; ++q) moved = std::max(moved, std::abs(trial[q] - y[q]));
        y = trial;
        if (moved < 1e-14) break;
      }
    }
    return {value(y, 0.0), y};
  }

  static Point solve_dense(std::vector<double> a, Point b, std::size_t n) {
    for (std::size_t c = 0; c < n; ++c) a[c * n + c] += 1e-14;
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::abs(a[r * n + c]) > std::abs(a[p * n + c])) p = r;
      for (std::size_t q = 0; q < n; ++q) std::swap(a[c * n + q], a[p * n + q]);
      std::swap(b[c], b[p]);
      for (std::size_t r = c + 1; r < n; ++r) {
        const double f = a[r * n + c] / a[c * n + c];
        for (std::size_t q = c; q < n; ++q) a[r * n + q] -= f * a[c * n + q];
        b[r] -= f * b[c];
      }
    }
    Point x(n);
    for (std::size_t c = n; c-- > 0;) {
      double s = b[c];
      for (std::size_t q = c + 1; q < n; ++q) s -= a[c * n + q] * x[q];
      x[c] = s / a[c * n + c];
    }
    return x;
  }
};

/// Euclidean angle between two vectors, in [0, pi].
inline double euclidean_angle(const std::vector<double>& u, const std::vector<double>& v) {
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) {
    uv += u[a] * v[a];
    uu += u[a] * u[a];
    vv += v[a] * v[a];
  }
  return std::acos(std::clamp(uv / std::sqrt(uu * vv), -1.0, 1.0));
}

}  // namespace oracle
