#include "wnet/multimarginal.hpp"

#include <algorithm>
#include <cmath>

#include "wnet/error.hpp"
#include "wnet/lp.hpp"
#include "wnet/transport.hpp"

namespace wnet {

StarWeights::StarWeights(std::vector<double> sigmas) : sigmas_(std::move(sigmas)), total_(0.0) {
  if (sigmas_.size() < 2) throw Error(ErrorKind::InvalidArgument, "star weights need l >= 2");
  for (double s : sigmas_) {
    if (!(s > 0.0) || !std::isfinite(s)) throw Error(ErrorKind::InvalidArgument, "star weights must be positive");
    total_ += s;
  }
}

StarWeights StarWeights::normalized_to_half() const {
  std::vector<double> s = sigmas_;
  for (double& x : s) x *= 0.5 / total_;
  return StarWeights(std::move(s));
}

namespace {

void check_points(const PointList& xs, const StarWeights& w) {
  if (xs.size() != w.size()) throw Error(ErrorKind::InvalidArgument, "point count differs from weight count");
  for (const auto& x : xs) {
    if (x.size() != xs.front().size()) throw Error(ErrorKind::DimensionMismatch, "points of different dimension");
  }
}

void check_marginals(const std::vector<DiscreteMeasure>& mus, const StarWeights& w) {
  if (mus.size() != w.size()) throw Error(ErrorKind::InvalidArgument, "marginal count differs from weight count");
  for (const auto& mu : mus) {
    if (mu.dim() != mus.front().dim()) throw Error(ErrorKind::DimensionMismatch, "marginals of different dimension");
  }
}

std::size_t product_size(const std::vector<DiscreteMeasure>& mus, std::size_t cap) {
  std::size_t n = 1;
  for (const auto& mu : mus) {
    if (n > cap / mu.size()) {
      throw Error(ErrorKind::InstanceTooLarge, "product of support sizes exceeds " + std::to_string(cap));
    }
    n *= mu.size();
  }
  return n;
}

// Mixed-radix decoding, last marginal fastest.
void decode(std::size_t flat, const std::vector<DiscreteMeasure>& mus, std::vector<std::size_t>& idx) {
  for (std::size_t i = mus.size(); i-- > 0;) {
    idx[i] = flat % mus[i].size();
    flat /= mus[i].size();
  }
}

// Barycenter and star cost of the tuple idx, written into bar.
double tuple_cost(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                  const std::vector<std::size_t>& idx, std::vector<double>& bar) {
  const std::size_t dim = mus.front().dim();
  std::fill(bar.begin(), bar.end(), 0.0);
  for (std::size_t i = 0; i < mus.size(); ++i) {
    const auto x = mus[i].point(idx[i]);
    for (std::size_t a = 0; a < dim; ++a) bar[a] += w[i] * x[a];
  }
  for (double& b : bar) b /= w.total();
  double c = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) c += w[i] * squared_distance(mus[i].point(idx[i]), bar);
  return c;
}

}  // namespace

std::vector<double> barycenter_point(const PointList& xs, const StarWeights& w) {
  check_points(xs, w);
  std::vector<double> bar(xs.front().size(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t a = 0; a < bar.size(); ++a) bar[a] += w[i] * xs[i][a];
  }
  for (double& b : bar) b /= w.total();
  return bar;
}

double star_cost(const PointList& xs, const StarWeights& w) {
  const auto bar = barycenter_point(xs, w);
  double c = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) c += w[i] * squared_distance(xs[i], bar);
  return c;
}

double MultiPlan::marginal_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    std::vector<double> pushed(marginals[i].size(), 0.0);
    for (const auto& atom : atoms) pushed[atom.idx[i]] += atom.mass;
    for (std::size_t a = 0; a < pushed.size(); ++a) {
      worst = std::max(worst, std::abs(pushed[a] - marginals[i].weight(a)));
    }
  }
  return worst;
}

MultiPlan solve_multimarginal(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                              std::size_t product_cap) {
  check_marginals(mus, w);
  const std::size_t l = mus.size();
  const std::size_t tuples = product_size(mus, product_cap);

  std::vector<std::size_t> offset(l, 0);
  for (std::size_t i = 1; i < l; ++i) offset[i] = offset[i - 1] + mus[i - 1].size();
  const std::size_t rows = offset.back() + mus.back().size();

  lp::Problem problem{lp::SparseColumns(rows), {}, {}};
  problem.a.reserve(tuples, tuples * l);
  problem.c.reserve(tuples);
  for (std::size_t i = 0; i < l; ++i) {
    problem.b.insert(problem.b.end(), mus[i].weights().begin(), mus[i].weights().end());
  }

  std::vector<std::size_t> idx(l);
  std::vector<double> bar(mus.front().dim());
  std::vector<std::pair<std::size_t, double>> entries(l);
  for (std::size_t t = 0; t < tuples; ++t) {
    decode(t, mus, idx);
    for (std::size_t i = 0; i < l; ++i) entries[i] = {offset[i] + idx[i], 1.0};
    problem.a.add_column(entries);
    problem.c.push_back(tuple_cost(mus, w, idx, bar));
  }

  const lp::Solution sol = lp::solve(problem);
  if (sol.status != lp::Status::Optimal) {
    throw Error(ErrorKind::InvalidArgument, "multi-marginal LP did not reach optimality");
  }

  MultiPlan plan;
  plan.marginals = mus;
  for (std::size_t t = 0; t < tuples; ++t) {
    if (sol.x[t] <= kAtomCutoff) continue;
    decode(t, mus, idx);
    plan.atoms.push_back({idx, sol.x[t]});
  }
  plan.cost_value = sol.objective;
  plan.duality_gap = sol.objective - sol.dual_objective;
  return plan;
}

DiscreteMeasure pushforward_barycenter(const MultiPlan& plan, const StarWeights& w) {
  check_marginals(plan.marginals, w);
  const std::size_t dim = plan.marginals.front().dim();
  std::vector<double> coords, weights, bar(dim);
  for (const auto& atom : plan.atoms) {
    tuple_cost(plan.marginals, w, atom.idx, bar);
    coords.insert(coords.end(), bar.begin(), bar.end());
    weights.push_back(atom.mass);
  }
  return merge_coincident(dim, coords, weights);
}

double psi(const std::vector<DiscreteMeasure>& mus, const StarWeights& w, const DiscreteMeasure& nu) {
  check_marginals(mus, w);
  double s = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) s += w[i] * solve_ot_exact(mus[i], nu).cost_value;
  return s;
}

PointList tuple_barycenters(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                            std::size_t product_cap) {
  check_marginals(mus, w);
  const std::size_t tuples = product_size(mus, product_cap);
  PointList out;
  out.reserve(tuples);
  std::vector<std::size_t> idx(mus.size());
  std::vector<double> bar(mus.front().dim());
  for (std::size_t t = 0; t < tuples; ++t) {
    decode(t, mus, idx);
    tuple_cost(mus, w, idx, bar);
    out.push_back(bar);
  }
  return out;
}

BarycenterResult fixed_support_barycenter(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                                          const PointList& support, std::size_t variable_cap) {
  check_marginals(mus, w);
  if (support.empty()) throw Error(ErrorKind::InvalidArgument, "candidate support is empty");
  const std::size_t dim = mus.front().dim();
  for (const auto& y : support) {
    if (y.size() != dim) throw Error(ErrorKind::DimensionMismatch, "support point of wrong dimension");
  }
  const std::size_t l = mus.size(), s_count = support.size();
  std::size_t columns = 0;
  for (const auto& mu : mus) columns += mu.size() * s_count;
  if (columns > variable_cap) {
    throw Error(ErrorKind::InstanceTooLarge, "fixed-support LP has " + std::to_string(columns) + " variables");
  }

  // Rows: one per marginal atom, then (l-1) * |support| coupling rows tying
  // each marginal's column sums to those of marginal 0.
  std::vector<std::size_t> offset(l, 0);
  for (std::size_t i = 1; i < l; ++i) offset[i] = offset[i - 1] + mus[i - 1].size();
  const std::size_t marginal_rows = offset.back() + mus.back().size();
  const std::size_t rows = marginal_rows + (l - 1) * s_count;
  auto coupling_row = [&](std::size_t i, std::size_t s) { return marginal_rows + (i - 1) * s_count + s; };

  lp::Problem problem{lp::SparseColumns(rows), std::vector<double>(rows, 0.0), {}};
  for (std::size_t i = 0; i < l; ++i) {
    std::copy(mus[i].weights().begin(), mus[i].weights().end(), problem.b.begin() + offset[i]);
  }
  std::vector<std::pair<std::size_t, double>> entries;
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t a = 0; a < mus[i].size(); ++a) {
      for (std::size_t s = 0; s < s_count; ++s) {
        entries.clear();
        entries.emplace_back(offset[i] + a, 1.0);
        if (i == 0) {
          for (std::size_t k = 1; k < l; ++k) entries.emplace_back(coupling_row(k, s), -1.0);
        } else {
          entries.emplace_back(coupling_row(i, s), 1.0);
        }
        problem.a.add_column(entries);
        problem.c.push_back(w[i] * squared_distance(mus[i].point(a), support[s]));
      }
    }
  }

  const lp::Solution sol = lp::solve(problem);
  if (sol.status != lp::Status::Optimal) {
    throw Error(ErrorKind::InvalidArgument, "fixed-support barycenter LP did not reach optimality");
  }
  std::vector<double> weight(s_count, 0.0);
  for (std::size_t a = 0; a < mus[0].size(); ++a) {
    for (std::size_t s = 0; s < s_count; ++s) weight[s] += sol.x[a * s_count + s];
  }
  std::vector<double> coords;
  for (const auto& y : support) coords.insert(coords.end(), y.begin(), y.end());
  return {merge_coincident(dim, coords, weight), sol.objective, sol.objective - sol.dual_objective};
}

BarycenterResult exact_barycenter(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                                  std::size_t product_cap) {
  const MultiPlan plan = solve_multimarginal(mus, w, product_cap);
  return {pushforward_barycenter(plan, w), plan.cost_value, plan.duality_gap};
}

FreeSupportResult free_support_barycenter(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                                          const DiscreteMeasure& init, const FreeSupportOptions& options) {
  check_marginals(mus, w);
  if (init.dim() != mus.front().dim()) throw Error(ErrorKind::DimensionMismatch, "init has the wrong dimension");
  const std::size_t dim = init.dim();
  DiscreteMeasure current = merge_coincident(dim, init.coords(), init.weights());

  FreeSupportResult result{current, 0.0, {}, 0, false};
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    std::vector<double> next(current.size() * dim, 0.0);
    double value = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
      const TransportPlan plan = solve_ot_exact(current, mus[i]);
      value += w[i] * plan.cost_value;
      const std::vector<double> image = barycentric_map(plan);
      for (std::size_t k = 0; k < next.size(); ++k) next[k] += w[i] * image[k] / w.total();
    }
    result.psi_history.push_back(value);
    result.measure = current;
    result.psi = value;
    result.iterations = it;
    if (it > 0 && result.psi_history[it - 1] - value < options.tol) {
      result.converged = true;
      return result;
    }
    current = merge_coincident(dim, next, current.weights());
  }
  result.psi = psi(mus, w, current);
  result.psi_history.push_back(result.psi);
  result.measure = current;
  result.iterations = options.max_iter;
  return result;
}

}  // namespace wnet
