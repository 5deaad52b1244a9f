#include "wnet/topology.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "wnet/error.hpp"

namespace wnet {

Topology Topology::make(std::size_t k, std::size_t vertex_count, std::vector<Edge> edges) {
  Topology t;
  t.vertex_count = vertex_count;
  for (auto& e : edges) {
    if (e.first > e.second) std::swap(e.first, e.second);
  }
  std::sort(edges.begin(), edges.end());
  t.edges = std::move(edges);
  t.terminals.resize(k);
  std::iota(t.terminals.begin(), t.terminals.end(), 0);
  for (std::size_t v = k; v < vertex_count; ++v) t.free.push_back(v);
  t.validate();
  return t;
}

void Topology::validate() const {
  if (vertex_count == 0 || edges.size() + 1 != vertex_count) {
    throw Error(ErrorKind::InvalidArgument, "topology is not a tree: " + std::to_string(vertex_count) +
                                                " vertices, " + std::to_string(edges.size()) + " edges");
  }
  std::set<std::size_t> seen(terminals.begin(), terminals.end());
  if (seen.size() != terminals.size()) throw Error(ErrorKind::InvalidArgument, "terminals are not distinct");
  for (std::size_t v : free) {
    if (seen.count(v)) throw Error(ErrorKind::InvalidArgument, "vertex is both terminal and free");
    seen.insert(v);
  }
  if (seen.size() != vertex_count || *seen.rbegin() >= vertex_count) {
    throw Error(ErrorKind::InvalidArgument, "terminals and free vertices must partition the vertices");
  }
  for (const auto& [u, v] : edges) {
    if (u >= vertex_count || v >= vertex_count || u == v) {
      throw Error(ErrorKind::InvalidArgument, "bad edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
    }
  }
  // Connectivity via union-find; with |E| = |V| - 1 this also rules out cycles.
  std::vector<std::size_t> parent(vertex_count);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [u, v] : edges) {
    const auto ru = find(u), rv = find(v);
    if (ru == rv) throw Error(ErrorKind::InvalidArgument, "topology contains a cycle");
    parent[ru] = rv;
  }
  const auto adj = adjacency();
  for (std::size_t v : free) {
    if (adj[v].size() < 3) {
      throw Error(ErrorKind::InvalidArgument, "free vertex " + std::to_string(v) + " has degree < 3");
    }
  }
}

std::vector<std::vector<std::size_t>> Topology::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(vertex_count);
  for (const auto& [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

bool Topology::is_full() const {
  const auto adj = adjacency();
  if (terminals.size() == 2) return free.empty();
  if (free.size() + 2 != terminals.size()) return false;
  for (std::size_t v : terminals) {
    if (adj[v].size() != 1) return false;
  }
  for (std::size_t v : free) {
    if (adj[v].size() != 3) return false;
  }
  return true;
}

std::vector<unsigned> Topology::splits() const {
  const auto adj = adjacency();
  std::vector<unsigned> out;
  for (const auto& [u, v] : edges) {
    // Terminals reachable from v without crossing the edge.
    unsigned mask = 0;
    std::vector<std::size_t> stack{v};
    std::vector<bool> seen(vertex_count, false);
    seen[u] = seen[v] = true;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      if (is_terminal(x)) mask |= 1u << x;
      for (std::size_t y : adj[x]) {
        if (!seen[y]) {
          seen[y] = true;
          stack.push_back(y);
        }
      }
    }
    const unsigned all = (1u << terminals.size()) - 1;
    if (mask & 1u) mask = all & ~mask;
    out.push_back(mask);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string Topology::describe() const {
  std::ostringstream os;
  os << "k=" << terminals.size() << " free=" << free.size() << " edges=";
  for (const auto& [u, v] : edges) os << '(' << u << ',' << v << ')';
  return os.str();
}

Topology contract_edge(const Topology& t, std::size_t edge) {
  if (edge >= t.edges.size()) throw Error(ErrorKind::InvalidArgument, "edge index out of range");
  auto [u, v] = t.edges[edge];
  if (t.is_terminal(u) && t.is_terminal(v)) {
    throw Error(ErrorKind::InvalidArgument, "cannot contract an edge between two terminals");
  }
  // Keep u; v (always free here) disappears.
  if (t.is_terminal(v) || (!t.is_terminal(u) && v < u)) std::swap(u, v);
  const std::size_t k = t.terminals.size();
  std::vector<std::size_t> relabel(t.vertex_count);
  for (std::size_t x = 0, next = 0; x < t.vertex_count; ++x) {
    if (x != v) relabel[x] = next++;
  }
  relabel[v] = relabel[u];
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < t.edges.size(); ++e) {
    if (e == edge) continue;
    edges.emplace_back(relabel[t.edges[e].first], relabel[t.edges[e].second]);
  }
  return Topology::make(k, t.vertex_count - 1, std::move(edges));
}

namespace {

std::vector<Topology> full_topologies(std::size_t k) {
  if (k == 2) return {Topology::make(2, 2, {{0, 1}})};
  // Grow from the 3-star by inserting terminal t on every edge of every tree.
  // Vertex ids: terminals 0..k-1, free vertex j at k + j.
  std::vector<std::vector<Edge>> trees{{{0, k}, {1, k}, {2, k}}};
  for (std::size_t t = 3; t < k; ++t) {
    std::vector<std::vector<Edge>> grown;
    const std::size_t s = k + (t - 2);
    for (const auto& tree : trees) {
      for (std::size_t e = 0; e < tree.size(); ++e) {
        auto next = tree;
        const auto [a, b] = tree[e];
        next[e] = {a, s};
        next.emplace_back(s, b);
        next.emplace_back(t, s);
        grown.push_back(std::move(next));
      }
    }
    trees = std::move(grown);
  }
  std::vector<Topology> out;
  for (auto& tree : trees) out.push_back(Topology::make(k, 2 * k - 2, std::move(tree)));
  return out;
}

}  // namespace

std::vector<Topology> enumerate_topologies(std::size_t k, bool allow_degenerate) {
  if (k < 2 || k > 6) throw Error(ErrorKind::KTooLarge, "k = " + std::to_string(k) + " outside 2..6");
  std::vector<Topology> out = full_topologies(k);
  if (!allow_degenerate || k == 2) return out;

  std::set<std::vector<unsigned>> seen;
  for (const auto& t : out) seen.insert(t.splits());
  // Breadth-first closure under single contractions; each contracted tree is
  // kept once per split system.
  std::vector<Topology> frontier = out;
  while (!frontier.empty()) {
    std::vector<Topology> next;
    for (const auto& t : frontier) {
      for (std::size_t e = 0; e < t.edges.size(); ++e) {
        if (t.is_terminal(t.edges[e].first) && t.is_terminal(t.edges[e].second)) continue;
        Topology c = contract_edge(t, e);
        if (seen.insert(c.splits()).second) {
          out.push_back(c);
          next.push_back(std::move(c));
        }
      }
    }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace wnet
