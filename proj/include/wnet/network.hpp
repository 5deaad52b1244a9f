#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "wnet/measures.hpp"
#include "wnet/multimarginal.hpp"
#include "wnet/topology.hpp"
#include "wnet/transport.hpp"

namespace wnet {

struct NetworkParams {
  std::size_t max_sweeps = 500;
  double tol = 1e-10;  // stop when a sweep lowers the length by less than tol * length
  /// An edge shorter than this (in W2) is contracted; also caps sigma at 1/collapse.
  double collapse = 1e-6;
  /// Product-of-supports cap for the exact barycenter step; larger stars fall
  /// back to the free-support iteration.
  std::size_t product_cap = 60'000;
  /// Largest support a free vertex may take from the exact step; beyond it
  /// the vertex is moved by the free-support iteration from its current
  /// value instead. 0 means the total atom count of the terminals.
  std::size_t support_cap = 0;
  FreeSupportOptions free_support{100, 1e-13};
};

struct NetworkSolution {
  Topology topology;
  std::vector<DiscreteMeasure> assignment;  // indexed by vertex
  /// Densities of the boundary measures when they were supplied on a grid.
  std::vector<std::optional<GridMeasure>> boundary_grids;
  std::vector<TransportPlan> edge_plans;  // plan from edges[e].first to edges[e].second
  std::vector<double> edge_lengths;
  double total_length = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t contractions = 0;
  /// Total length after each sweep; a contraction starts a new phase.
  std::vector<double> length_history;
  std::vector<std::size_t> phase_starts;
};

/// Cyclic coordinate descent over the free vertices (in index order): each is
/// replaced by the exact barycenter of its neighbours with sigma_u = 1/W2 to
/// the current vertex. Edges that fall below params.collapse are contracted and
/// the descent restarts on the smaller tree.
NetworkSolution optimize_network(const Topology& topology, const std::vector<DiscreteMeasure>& boundary,
                                 const NetworkParams& params = {});

/// Same, with boundary densities kept for energy evaluation. The solver works
/// on the cell-centre discretization of each grid measure.
NetworkSolution optimize_network(const Topology& topology, const std::vector<GridMeasure>& boundary,
                                 const NetworkParams& params = {});

/// Best solution over enumerate_topologies(k, allow_degenerate).
NetworkSolution solve_best_network(const std::vector<DiscreteMeasure>& boundary, bool allow_degenerate,
                                   const NetworkParams& params = {});
NetworkSolution solve_best_network(const std::vector<GridMeasure>& boundary, bool allow_degenerate,
                                   const NetworkParams& params = {});

double network_length(const NetworkSolution& solution);

/// Displacement interpolation along the stored plan of `edge` at each t.
std::vector<DiscreteMeasure> sample_edge(const NetworkSolution& solution, std::size_t edge,
                                         const std::vector<double>& ts);

struct SpanningTree {
  std::vector<Edge> edges;
  double length = 0.0;
};

/// Kruskal on the complete W2 graph; ties broken by (i, j) order.
SpanningTree minimum_spanning_tree(const std::vector<DiscreteMeasure>& measures);

struct RatioEntry {
  double steiner_length = 0.0;  // L_s: best network found, capped at L_a
  double mst_length = 0.0;      // L_a
  double ratio = 1.0;
  std::size_t topologies_tried = 0;
};

struct SteinerRatioReport {
  std::vector<RatioEntry> entries;
  std::vector<double> running_min;
  double min_ratio = 1.0;
};

/// Per-instance L_s / L_a over every (full and degenerate) topology, with
/// instances distributed over `jobs` threads.
SteinerRatioReport steiner_ratio_estimate(const std::vector<std::vector<DiscreteMeasure>>& instances,
                                          const NetworkParams& params = {}, std::size_t jobs = 1);

}  // namespace wnet
