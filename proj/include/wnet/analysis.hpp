#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wnet/measures.hpp"
#include "wnet/multimarginal.hpp"
#include "wnet/network.hpp"

namespace wnet {

/// Allowance for the upward discretization error of the energy of a
/// rasterized measure: c1 * diam + c2 * diam^2 * (max log rho - min log rho),
/// where diam is the cell diameter. Fitted once on closed-form geodesics
/// (dilations of uniform blocks in 1D and 2D, sub-cell translates, random
/// density blocks; worst observed c1 ratio 0.504) and frozen. Cloud-in-cell
/// smoothing can lower an energy by far more than this; only the upward side
/// is bounded.
struct GridTolerance {
  static constexpr double c1 = 0.75;
  static constexpr double c2 = 1.0;
  static double evaluate(const GridGeometry& g, double log_density_variation);
};

/// max log rho - min log rho over the cells with positive mass.
double log_density_variation(const GridMeasure& mu);

struct EnergySample {
  std::size_t edge = 0;
  double t = 0.0;
  double energy = 0.0;
};

struct MaxPrincipleReport {
  std::string functional;
  double boundary_max = 0.0;  // m
  double network_max = 0.0;   // M
  std::size_t samples_per_edge = 0;
  double margin = 0.0;  // M - m
  double tolerance = 0.0;
  bool pass = false;
  /// Some boundary energy is +inf (e.g. an atom under NegEntropy); the
  /// inequality holds trivially.
  bool infinite_boundary = false;
  std::vector<EnergySample> profile;

  /// `edge_id,t,energy` rows with a header line.
  std::string csv() const;
};

/// Samples every edge geodesic at samples_per_edge evenly spaced t in [0,1],
/// rasterizes each sample onto `grid` (cloud-in-cell) and compares the largest
/// energy with the largest boundary energy. Boundary energies come from the
/// stored boundary densities; boundaries without one count as +inf.
/// A negative `tolerance` selects GridTolerance on the boundary densities.
MaxPrincipleReport verify_max_principle(const NetworkSolution& solution, const EnergyFunctional& f,
                                        std::size_t samples_per_edge, const GridGeometry& grid,
                                        double tolerance = -1.0);

struct BarycentricReport {
  std::vector<double> boundary_energies;
  double weighted_average = 0.0;  // sum_i sigma_i f(mu_i) / sum sigma
  double barycenter_energy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// f(barycenter) <= sum_i (sigma_i / sum sigma) f(mu_i) + tolerance, with the
/// barycenter rasterized onto the marginals' common grid.
BarycentricReport verify_barycentric_max_principle(const std::vector<GridMeasure>& mus, const StarWeights& w,
                                                   const DiscreteMeasure& barycenter, const EnergyFunctional& f,
                                                   double tolerance = -1.0);

/// Angle in L2(nu) between the displacement fields T_a - id and T_b - id of the
/// barycentric projections of optimal plans from nu to a and to b.
double tangent_angle(const DiscreteMeasure& nu, const DiscreteMeasure& a, const DiscreteMeasure& b);

struct AngleReport {
  std::size_t vertex = 0;
  std::vector<std::size_t> neighbors;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // neighbor pairs, same order as angles
  std::vector<double> angles;
  double max_deviation = 0.0;  // from 2 pi / 3
  double angle_sum = 0.0;
  /// Gram determinant of the normalized displacement fields is <= 1e-6
  /// (only computed for degree 3; the angle sum is meaningful only then).
  bool coplanar = false;
  /// Vertex measure has more than one atom: the discrete stand-in for an
  /// absolutely continuous vertex.
  bool spread = false;
};

/// Throws ZeroDisplacement if an incident edge has W2 below 1e-9.
AngleReport angle_at_vertex(const NetworkSolution& solution, std::size_t vertex);

struct LinftyA1 {};
struct LinftyInterior {
  std::size_t edges;  // k
  double M;           // edge lengths lie in [1/M, 1/m]
  double m;
};
struct LinftyGlobal {
  std::size_t edges;
  double M;
  double m;
  double lambda;
};
using LinftyVariant = std::variant<LinftyA1, LinftyInterior, LinftyGlobal>;

struct LinftyReport {
  std::string variant;
  double norm = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Compares the grid L-infinity norm of `barycenter` with the selected bound.
/// Raw sigmas are rescaled to sum to 1/2 (a single marginal is allowed).
/// All measures must share one grid, else GeometryMismatch.
LinftyReport check_linfty(const GridMeasure& barycenter, const std::vector<GridMeasure>& mus,
                          const std::vector<double>& sigmas, const LinftyVariant& variant);

/// k, M, m of a solved network for the interior and global corollaries.
LinftyInterior network_linfty_params(const NetworkSolution& solution);

struct CounterexampleCertificate {
  DiscreteMeasure mu1, mu2;
  DiscreteMeasure nu_a, nu_b;   // midpoints of the two optimal matchings
  double cost_a = 0.0, cost_b = 0.0;  // the two matching costs
  double d1a = 0.0, d1b = 0.0, d2a = 0.0, d2b = 0.0;
  double mutual = 0.0;  // W2(nu_a, nu_b)
  bool reflection_swaps = false;
  bool pass = false;
};

/// Two atoms on each axis: both matchings are optimal, and their midpoints
/// are distinct barycenters exchanged by the reflection (x, y) -> (x, -y).
CounterexampleCertificate counterexample_demo();

}  // namespace wnet
