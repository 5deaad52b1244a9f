#include "wnet/network.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <numeric>
#include <thread>

#include "wnet/error.hpp"

namespace wnet {

namespace {

double edge_w2(const DiscreteMeasure& a, const DiscreteMeasure& b) { return w2(a, b); }

DiscreteMeasure star_barycenter(const std::vector<DiscreteMeasure>& mus, const std::vector<double>& sigmas,
                                const DiscreteMeasure& hint, const NetworkParams& params, std::size_t support_cap) {
  const StarWeights w(sigmas);
  std::size_t product = 1;
  bool small = true;
  for (const auto& mu : mus) {
    if (product > params.product_cap / mu.size()) {
      small = false;
      break;
    }
    product *= mu.size();
  }
  if (small) {
    DiscreteMeasure exact = exact_barycenter(mus, w, params.product_cap).measure;
    // Two nearly coincident free vertices keep refining each other's
    // support; past the cap only the atom locations move.
    if (exact.size() <= support_cap || hint.size() > support_cap) return exact;
  }
  return free_support_barycenter(mus, w, hint, params.free_support).measure;
}

struct Descent {
  Topology topo;
  std::vector<DiscreteMeasure> nu;
  const NetworkParams& params;
  NetworkSolution out;
  std::size_t support_cap = 0;

  Descent(const Topology& t, const std::vector<DiscreteMeasure>& boundary, const NetworkParams& p)
      : topo(t), nu(), params(p) {
    topo.validate();
    if (boundary.size() != topo.terminals.size()) {
      throw Error(ErrorKind::InvalidArgument, "topology has " + std::to_string(topo.terminals.size()) +
                                                  " terminals but " + std::to_string(boundary.size()) +
                                                  " boundary measures were given");
    }
    for (const auto& mu : boundary) {
      if (mu.dim() != boundary.front().dim()) throw Error(ErrorKind::DimensionMismatch, "boundary dimensions differ");
    }
    if (!(params.collapse > 0.0)) throw Error(ErrorKind::InvalidArgument, "collapse threshold must be positive");
    nu.assign(boundary.begin(), boundary.end());
    support_cap = params.support_cap;
    if (support_cap == 0) {
      for (const auto& mu : boundary) support_cap += mu.size();
    }
    initialize();
  }

  // Free vertices in order of BFS distance from the terminals; each starts at
  // the uniform barycenter of its already-placed neighbours.
  void initialize() {
    const auto adj = topo.adjacency();
    const std::size_t k = topo.terminals.size();
    std::vector<std::size_t> dist(topo.vertex_count, SIZE_MAX);
    std::deque<std::size_t> queue;
    for (std::size_t t = 0; t < k; ++t) {
      dist[t] = 0;
      queue.push_back(t);
    }
    while (!queue.empty()) {
      const auto x = queue.front();
      queue.pop_front();
      for (std::size_t y : adj[x]) {
        if (dist[y] == SIZE_MAX) {
          dist[y] = dist[x] + 1;
          queue.push_back(y);
        }
      }
    }
    std::vector<std::size_t> order = topo.free;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist[a] < dist[b]; });

    std::vector<bool> placed(topo.vertex_count, false);
    std::fill(placed.begin(), placed.begin() + static_cast<std::ptrdiff_t>(k), true);
    std::vector<std::optional<DiscreteMeasure>> slot(topo.vertex_count);
    for (std::size_t t = 0; t < k; ++t) slot[t] = nu[t];
    for (std::size_t v : order) {
      std::vector<DiscreteMeasure> around;
      for (std::size_t u : adj[v]) {
        if (placed[u]) around.push_back(*slot[u]);
      }
      if (around.size() < 2) around.assign(nu.begin(), nu.begin() + static_cast<std::ptrdiff_t>(k));
      slot[v] = star_barycenter(around, std::vector<double>(around.size(), 1.0), around.front(), params, SIZE_MAX);
      placed[v] = true;
    }
    for (std::size_t v = k; v < topo.vertex_count; ++v) nu.push_back(*slot[v]);
  }

  void contract(std::size_t edge) {
    const auto [a, b] = topo.edges[edge];
    std::size_t removed;
    if (topo.is_terminal(a)) removed = b;
    else if (topo.is_terminal(b)) removed = a;
    else removed = std::max(a, b);
    topo = contract_edge(topo, edge);
    nu.erase(nu.begin() + static_cast<std::ptrdiff_t>(removed));
    ++out.contractions;
  }

  std::optional<std::size_t> edge_index(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    for (std::size_t e = 0; e < topo.edges.size(); ++e) {
      if (topo.edges[e] == Edge{a, b}) return e;
    }
    return std::nullopt;
  }

  double total_length() const {
    double total = 0.0;
    for (const auto& [a, b] : topo.edges) total += edge_w2(nu[a], nu[b]);
    return total;
  }

  // First free-incident edge shorter than the collapse threshold.
  std::optional<std::size_t> short_edge() const {
    for (std::size_t e = 0; e < topo.edges.size(); ++e) {
      const auto [a, b] = topo.edges[e];
      if (topo.is_terminal(a) && topo.is_terminal(b)) continue;
      if (edge_w2(nu[a], nu[b]) < params.collapse) return e;
    }
    return std::nullopt;
  }

  // One sweep; returns an edge to contract if a sigma clamp fired.
  std::optional<std::size_t> sweep() {
    const auto adj = topo.adjacency();
    for (std::size_t v : topo.free) {
      std::vector<DiscreteMeasure> around;
      std::vector<double> sigmas;
      for (std::size_t u : adj[v]) {
        const double d = edge_w2(nu[v], nu[u]);
        if (d < params.collapse) return edge_index(u, v);
        around.push_back(nu[u]);
        sigmas.push_back(1.0 / d);
      }
      nu[v] = star_barycenter(around, sigmas, nu[v], params, support_cap);
    }
    return std::nullopt;
  }

  void run() {
    std::size_t sweeps = 0;
    bool phase_open = false;
    double previous = 0.0;
    while (true) {
      if (!phase_open) {
        if (auto e = short_edge()) {
          contract(*e);
          continue;
        }
        out.phase_starts.push_back(out.length_history.size());
        previous = total_length();
        out.length_history.push_back(previous);
        phase_open = true;
      }
      if (topo.free.empty()) {
        out.converged = true;
        break;
      }
      if (sweeps == params.max_sweeps) break;
      ++sweeps;
      if (auto e = sweep()) {
        contract(*e);
        phase_open = false;
        continue;
      }
      const double length = total_length();
      out.length_history.push_back(length);
      if (auto e = short_edge()) {
        contract(*e);
        phase_open = false;
        continue;
      }
      if (previous - length < params.tol * std::max(length, 1e-300)) {
        out.converged = true;
        break;
      }
      previous = length;
    }
    out.iterations = sweeps;
    finish();
  }

  void finish() {
    out.topology = topo;
    out.assignment = nu;
    out.total_length = 0.0;
    for (const auto& [a, b] : topo.edges) {
      TransportPlan plan = solve_ot_exact(nu[a], nu[b]);
      const double len = std::sqrt(std::max(0.0, plan.cost_value));
      out.edge_lengths.push_back(len);
      out.total_length += len;
      out.edge_plans.push_back(std::move(plan));
    }
    out.boundary_grids.assign(topo.terminals.size(), std::nullopt);
  }
};

std::vector<DiscreteMeasure> discretize(const std::vector<GridMeasure>& boundary) {
  std::vector<DiscreteMeasure> out;
  out.reserve(boundary.size());
  for (const auto& g : boundary) out.push_back(grid_to_discrete(g));
  return out;
}

}  // namespace

NetworkSolution optimize_network(const Topology& topology, const std::vector<DiscreteMeasure>& boundary,
                                 const NetworkParams& params) {
  Descent d(topology, boundary, params);
  d.run();
  return std::move(d.out);
}

NetworkSolution optimize_network(const Topology& topology, const std::vector<GridMeasure>& boundary,
                                 const NetworkParams& params) {
  NetworkSolution s = optimize_network(topology, discretize(boundary), params);
  for (std::size_t t = 0; t < boundary.size(); ++t) s.boundary_grids[t] = boundary[t];
  return s;
}

NetworkSolution solve_best_network(const std::vector<DiscreteMeasure>& boundary, bool allow_degenerate,
                                   const NetworkParams& params) {
  std::optional<NetworkSolution> best;
  for (const auto& t : enumerate_topologies(boundary.size(), allow_degenerate)) {
    NetworkSolution s = optimize_network(t, boundary, params);
    if (!best || s.total_length < best->total_length) best = std::move(s);
  }
  return std::move(*best);
}

NetworkSolution solve_best_network(const std::vector<GridMeasure>& boundary, bool allow_degenerate,
                                   const NetworkParams& params) {
  NetworkSolution s = solve_best_network(discretize(boundary), allow_degenerate, params);
  for (std::size_t t = 0; t < boundary.size(); ++t) s.boundary_grids[t] = boundary[t];
  return s;
}

double network_length(const NetworkSolution& solution) {
  return std::accumulate(solution.edge_lengths.begin(), solution.edge_lengths.end(), 0.0);
}

std::vector<DiscreteMeasure> sample_edge(const NetworkSolution& solution, std::size_t edge,
                                         const std::vector<double>& ts) {
  if (edge >= solution.edge_plans.size()) throw Error(ErrorKind::InvalidArgument, "edge index out of range");
  std::vector<DiscreteMeasure> out;
  out.reserve(ts.size());
  for (double t : ts) out.push_back(displacement_interpolate(solution.edge_plans[edge], t));
  return out;
}

SpanningTree minimum_spanning_tree(const std::vector<DiscreteMeasure>& measures) {
  const std::size_t n = measures.size();
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "spanning tree needs at least two measures");
  struct Candidate {
    double w;
    std::size_t i, j;
  };
  std::vector<Candidate> all;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) all.push_back({w2(measures[i], measures[j]), i, j});
  }
  std::stable_sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) { return a.w < b.w; });
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  SpanningTree tree;
  for (const auto& c : all) {
    const auto ri = find(c.i), rj = find(c.j);
    if (ri == rj) continue;
    parent[ri] = rj;
    tree.edges.emplace_back(c.i, c.j);
    tree.length += c.w;
  }
  return tree;
}

SteinerRatioReport steiner_ratio_estimate(const std::vector<std::vector<DiscreteMeasure>>& instances,
                                          const NetworkParams& params, std::size_t jobs) {
  SteinerRatioReport report;
  report.entries.resize(instances.size());
  std::vector<std::exception_ptr> failures(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < instances.size(); i = next++) {
      try {
        const auto& boundary = instances[i];
        RatioEntry e;
        e.mst_length = minimum_spanning_tree(boundary).length;
        e.steiner_length = e.mst_length;
        const auto topologies = enumerate_topologies(boundary.size(), true);
        e.topologies_tried = topologies.size();
        for (const auto& t : topologies) {
          e.steiner_length = std::min(e.steiner_length, optimize_network(t, boundary, params).total_length);
        }
        e.ratio = e.mst_length > 0.0 ? e.steiner_length / e.mst_length : 1.0;
        report.entries[i] = e;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::max<std::size_t>(jobs, 1); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  double running = 1.0;
  for (const auto& e : report.entries) {
    running = std::min(running, e.ratio);
    report.running_min.push_back(running);
  }
  report.min_ratio = running;
  return report;
}

}  // namespace wnet
