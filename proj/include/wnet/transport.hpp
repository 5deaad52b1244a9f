#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "wnet/measures.hpp"

namespace wnet {

struct SquaredEuclidean {};

/// Row-major source x target cost matrix.
struct ExplicitMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
};

using CostSpec = std::variant<SquaredEuclidean, ExplicitMatrix>;

double squared_distance(std::span<const double> x, std::span<const double> y);

/// |x_i - y_j|^2 for every pair, row-major.
std::vector<double> squared_distance_matrix(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Coupling between two discrete measures together with Kantorovich
/// potentials. For exact solves u_i + v_j <= c_ij with equality on the support.
struct TransportPlan {
  DiscreteMeasure source;
  DiscreteMeasure target;
  std::vector<double> mass;         // row-major, source.size() x target.size()
  std::vector<double> cost_matrix;  // same layout as mass
  std::vector<double> dual_u;
  std::vector<double> dual_v;
  double cost_value = 0.0;
  bool converged = true;
  double marginal_error = 0.0;  // L1 violation of the source marginal

  std::size_t rows() const { return source.size(); }
  std::size_t cols() const { return target.size(); }
  double at(std::size_t i, std::size_t j) const { return mass[i * cols() + j]; }

  double dual_objective() const;
  double duality_gap() const { return cost_value - dual_objective(); }
  /// max over cells of u_i + v_j - c_ij (positive part).
  double dual_infeasibility() const;
};

/// Exact discrete optimal transport by the transportation (bipartite network)
/// simplex. Initial basis from the northwest-corner rule; Dantzig pricing with
/// a Bland fallback on degenerate stalls, so reruns give identical plans.
TransportPlan solve_ot_exact(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const CostSpec& cost = SquaredEuclidean{});

double w2(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct SinkhornOptions {
  double epsilon = 1e-2;
  std::size_t max_iter = 10000;
  double tol = 1e-9;  // L1 marginal violation
};

/// Entropically regularized transport, iterated in the log domain. On
/// non-convergence the iterate with the smallest marginal error is returned
/// with converged = false.
TransportPlan solve_sinkhorn(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                             const SinkhornOptions& options = {});

/// McCann interpolation: mass[i][j] placed at (1-t) x_i + t y_j. Points whose
/// coordinates agree within 1e-12 are merged; output is sorted lexicographically.
DiscreteMeasure displacement_interpolate(const TransportPlan& plan, double t);

/// Conditional mean of the target given each source point, flat (rows x dim).
std::vector<double> barycentric_map(const TransportPlan& plan);

/// Lexicographic sort of atoms with coincident points (within tol) merged.
/// Atoms lighter than kAtomCutoff (LP round-off) are dropped and the rest
/// renormalized.
DiscreteMeasure merge_coincident(std::size_t dim, std::span<const double> coords,
                                 std::span<const double> weights, double tol = 1e-12);

}  // namespace wnet
