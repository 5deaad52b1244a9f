#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace wnet {

using Edge = std::pair<std::size_t, std::size_t>;

/// Tree whose first k vertices are the terminals (vertex i carries boundary
/// measure i) and whose remaining vertices are free.
struct Topology {
  std::size_t vertex_count = 0;
  std::vector<Edge> edges;
  std::vector<std::size_t> terminals;
  std::vector<std::size_t> free;

  /// Builds a topology with terminals 0..k-1 and free vertices k..v-1.
  static Topology make(std::size_t k, std::size_t vertex_count, std::vector<Edge> edges);

  /// Throws InvalidArgument unless this is a tree, terminals are distinct and
  /// every free vertex has degree at least three.
  void validate() const;

  std::vector<std::vector<std::size_t>> adjacency() const;
  bool is_terminal(std::size_t v) const { return v < terminals.size(); }
  bool is_full() const;

  /// Terminal bipartition induced by each edge, as a bitmask of the side
  /// not containing terminal 0, sorted. Equal for isomorphic X-trees.
  std::vector<unsigned> splits() const;

  std::string describe() const;
};

/// Merges the endpoints of an edge. A free endpoint is absorbed into a
/// terminal one; two free endpoints keep the smaller index. Free vertices are
/// renumbered to stay contiguous after the terminals.
Topology contract_edge(const Topology& t, std::size_t edge);

/// Full Steiner topologies on k terminals ((2k-5)!! of them for k >= 3) and,
/// with allow_degenerate, every distinct tree reachable by contracting edges
/// without merging two terminals. Throws KTooLarge unless 2 <= k <= 6.
std::vector<Topology> enumerate_topologies(std::size_t k, bool allow_degenerate);

}  // namespace wnet
