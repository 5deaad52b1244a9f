#include "wnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "wnet/error.hpp"
#include "wnet/transport.hpp"

namespace wnet {

double GridTolerance::evaluate(const GridGeometry& g, double log_density_variation) {
  const double diam = g.cell_diameter();
  return c1 * diam + c2 * diam * diam * log_density_variation;
}

double log_density_variation(const GridMeasure& mu) {
  double lo = kInfinity, hi = -kInfinity;
  for (std::size_t c = 0; c < mu.cell_mass().size(); ++c) {
    if (mu.cell_mass()[c] <= 0.0) continue;
    const double l = std::log(mu.density(c));
    lo = std::min(lo, l);
    hi = std::max(hi, l);
  }
  return hi - lo;
}

std::string MaxPrincipleReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "edge_id,t,energy\n";
  for (const auto& s : profile) os << s.edge << ',' << s.t << ',' << s.energy << '\n';
  return os.str();
}

namespace {

GridMeasure on_grid(const GridMeasure& mu, const GridGeometry& grid) {
  if (mu.geometry() == grid) return mu;
  return rasterize(grid_to_discrete(mu), grid);
}

void require_shared_grid(const std::vector<GridMeasure>& mus) {
  for (const auto& mu : mus) {
    if (!(mu.geometry() == mus.front().geometry())) {
      throw Error(ErrorKind::GeometryMismatch, "measures do not share one grid");
    }
  }
}

}  // namespace

MaxPrincipleReport verify_max_principle(const NetworkSolution& solution, const EnergyFunctional& f,
                                        std::size_t samples_per_edge, const GridGeometry& grid,
                                        double tolerance) {
  if (samples_per_edge < 2) throw Error(ErrorKind::InvalidArgument, "need at least two samples per edge");
  grid.validate();
  MaxPrincipleReport report;
  report.functional = f.name();
  report.samples_per_edge = samples_per_edge;

  double variation = 0.0;
  report.boundary_max = -kInfinity;
  for (std::size_t t = 0; t < solution.topology.terminals.size(); ++t) {
    double e;
    if (t < solution.boundary_grids.size() && solution.boundary_grids[t]) {
      const GridMeasure g = on_grid(*solution.boundary_grids[t], grid);
      e = energy(g, f);
      variation = std::max(variation, log_density_variation(g));
    } else {
      e = energy(solution.assignment[t], f);
    }
    report.boundary_max = std::max(report.boundary_max, e);
  }
  report.infinite_boundary = std::isinf(report.boundary_max) && report.boundary_max > 0;
  report.tolerance = tolerance >= 0.0 ? tolerance : GridTolerance::evaluate(grid, variation);

  std::vector<double> ts(samples_per_edge);
  for (std::size_t j = 0; j < samples_per_edge; ++j) {
    ts[j] = static_cast<double>(j) / static_cast<double>(samples_per_edge - 1);
  }
  report.network_max = -kInfinity;
  for (std::size_t e = 0; e < solution.edge_plans.size(); ++e) {
    const auto samples = sample_edge(solution, e, ts);
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const double value = energy(rasterize(samples[j], grid), f);
      report.profile.push_back({e, ts[j], value});
      report.network_max = std::max(report.network_max, value);
    }
  }
  report.margin = report.network_max - report.boundary_max;
  report.pass = report.infinite_boundary || report.margin <= report.tolerance;
  return report;
}

BarycentricReport verify_barycentric_max_principle(const std::vector<GridMeasure>& mus, const StarWeights& w,
                                                   const DiscreteMeasure& barycenter, const EnergyFunctional& f,
                                                   double tolerance) {
  if (mus.size() != w.size()) throw Error(ErrorKind::InvalidArgument, "marginal count differs from weight count");
  require_shared_grid(mus);
  const GridGeometry& grid = mus.front().geometry();
  BarycentricReport report;
  double variation = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    report.boundary_energies.push_back(energy(mus[i], f));
    report.weighted_average += w[i] / w.total() * report.boundary_energies.back();
    variation = std::max(variation, log_density_variation(mus[i]));
  }
  report.barycenter_energy = energy(rasterize(barycenter, grid), f);
  report.tolerance = tolerance >= 0.0 ? tolerance : GridTolerance::evaluate(grid, variation);
  report.pass = report.barycenter_energy <= report.weighted_average + report.tolerance;
  return report;
}

namespace {

// T - id on the support of nu, flat (size x dim).
std::vector<double> displacement(const DiscreteMeasure& nu, const DiscreteMeasure& target) {
  if (w2(nu, target) < 1e-9) throw Error(ErrorKind::ZeroDisplacement, "edge has W2 below 1e-9");
  std::vector<double> d = barycentric_map(solve_ot_exact(nu, target));
  for (std::size_t k = 0; k < d.size(); ++k) d[k] -= nu.coords()[k];
  return d;
}

double inner(const DiscreteMeasure& nu, const std::vector<double>& u, const std::vector<double>& v) {
  double s = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    double dot = 0.0;
    for (std::size_t a = 0; a < nu.dim(); ++a) dot += u[i * nu.dim() + a] * v[i * nu.dim() + a];
    s += nu.weight(i) * dot;
  }
  return s;
}

double angle_of(const DiscreteMeasure& nu, const std::vector<double>& u, const std::vector<double>& v) {
  const double c = inner(nu, u, v) / std::sqrt(inner(nu, u, u) * inner(nu, v, v));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

double tangent_angle(const DiscreteMeasure& nu, const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return angle_of(nu, displacement(nu, a), displacement(nu, b));
}

AngleReport angle_at_vertex(const NetworkSolution& solution, std::size_t vertex) {
  if (vertex >= solution.assignment.size()) throw Error(ErrorKind::InvalidArgument, "vertex out of range");
  const DiscreteMeasure& nu = solution.assignment[vertex];
  AngleReport report;
  report.vertex = vertex;
  report.neighbors = solution.topology.adjacency()[vertex];
  report.spread = nu.size() > 1;

  std::vector<std::vector<double>> fields;
  for (std::size_t u : report.neighbors) fields.push_back(displacement(nu, solution.assignment[u]));
  constexpr double kTarget = 2.0 * std::numbers::pi / 3.0;
  for (std::size_t a = 0; a < fields.size(); ++a) {
    for (std::size_t b = a + 1; b < fields.size(); ++b) {
      const double angle = angle_of(nu, fields[a], fields[b]);
      report.pairs.emplace_back(report.neighbors[a], report.neighbors[b]);
      report.angles.push_back(angle);
      report.angle_sum += angle;
      report.max_deviation = std::max(report.max_deviation, std::abs(angle - kTarget));
    }
  }
  if (fields.size() == 3) {
    Eigen::Matrix3d gram;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        gram(a, b) = inner(nu, fields[a], fields[b]) /
                     std::sqrt(inner(nu, fields[a], fields[a]) * inner(nu, fields[b], fields[b]));
      }
    }
    report.coplanar = std::abs(gram.determinant()) <= 1e-6;
  }
  return report;
}

LinftyReport check_linfty(const GridMeasure& barycenter, const std::vector<GridMeasure>& mus,
                          const std::vector<double>& sigmas, const LinftyVariant& variant) {
  if (mus.empty() || sigmas.size() != mus.size()) {
    throw Error(ErrorKind::InvalidArgument, "need one sigma per marginal");
  }
  double total = 0.0;
  for (double s : sigmas) {
    if (!(s > 0.0)) throw Error(ErrorKind::InvalidArgument, "sigmas must be positive");
    total += s;
  }
  require_shared_grid(mus);
  if (!(barycenter.geometry() == mus.front().geometry())) {
    throw Error(ErrorKind::GeometryMismatch, "barycenter grid differs from the marginals' grid");
  }
  const double n = static_cast<double>(barycenter.dim());
  LinftyReport report;
  report.norm = barycenter.linf_norm();
  const double first = mus.front().linf_norm();

  if (std::holds_alternative<LinftyA1>(variant)) {
    report.variant = "A1";
    const double sigma1 = sigmas.front() / (2.0 * total);
    report.bound = std::pow(sigma1, -n) * first;
  } else if (const auto* in = std::get_if<LinftyInterior>(&variant)) {
    report.variant = "interior";
    const double k = static_cast<double>(in->edges);
    report.bound = std::pow(2.0 * k * in->M / in->m, k * n) * first;
  } else {
    const auto& g = std::get<LinftyGlobal>(variant);
    if (!(g.lambda > 1.0)) throw Error(ErrorKind::InvalidArgument, "lambda must exceed 1");
    report.variant = "global";
    const double k = static_cast<double>(g.edges);
    double top = 0.0;
    for (const auto& mu : mus) top = std::max(top, mu.linf_norm());
    report.bound = std::max(std::pow(g.lambda / (g.lambda - 1.0), n),
                            std::pow(2.0 * k * g.M / (g.lambda * g.m), k * n)) *
                   top;
  }
  report.pass = report.norm <= report.bound * (1.0 + 1e-9);
  return report;
}

LinftyInterior network_linfty_params(const NetworkSolution& solution) {
  if (solution.edge_lengths.empty()) throw Error(ErrorKind::InvalidArgument, "network has no edges");
  const auto [lo, hi] = std::minmax_element(solution.edge_lengths.begin(), solution.edge_lengths.end());
  return {solution.edge_lengths.size(), 1.0 / *lo, 1.0 / *hi};
}

CounterexampleCertificate counterexample_demo() {
  const DiscreteMeasure mu1(2, {1, 0, -1, 0}, {0.5, 0.5});
  const DiscreteMeasure mu2(2, {0, 1, 0, -1}, {0.5, 0.5});
  const std::vector<double> costs = squared_distance_matrix(mu1, mu2);

  // The two permutation couplings of the 2x2 problem.
  auto matching = [&](bool crossed) {
    TransportPlan plan{mu1, mu2, {0.5, 0.0, 0.0, 0.5}, costs, {}, {}, 0.0};
    if (crossed) plan.mass = {0.0, 0.5, 0.5, 0.0};
    for (std::size_t k = 0; k < 4; ++k) plan.cost_value += plan.mass[k] * costs[k];
    return plan;
  };
  const TransportPlan a = matching(false), b = matching(true);
  CounterexampleCertificate cert{mu1, mu2, displacement_interpolate(a, 0.5), displacement_interpolate(b, 0.5)};
  cert.cost_a = a.cost_value;
  cert.cost_b = b.cost_value;
  cert.d1a = w2(mu1, cert.nu_a);
  cert.d1b = w2(mu1, cert.nu_b);
  cert.d2a = w2(mu2, cert.nu_a);
  cert.d2b = w2(mu2, cert.nu_b);
  cert.mutual = w2(cert.nu_a, cert.nu_b);

  std::vector<double> reflected = cert.nu_a.coords();
  for (std::size_t i = 1; i < reflected.size(); i += 2) reflected[i] = -reflected[i];
  cert.reflection_swaps = merge_coincident(2, reflected, cert.nu_a.weights()) == cert.nu_b;

  const double optimum = solve_ot_exact(mu1, mu2).cost_value;
  cert.pass = std::abs(cert.cost_a - optimum) <= 1e-12 && std::abs(cert.cost_b - optimum) <= 1e-12 &&
              !(cert.nu_a == cert.nu_b) && std::abs(cert.d1a - cert.d1b) <= 1e-9 &&
              std::abs(cert.d2a - cert.d2b) <= 1e-9 && cert.mutual > 0.0 && cert.reflection_swaps;
  return cert;
}

}  // namespace wnet
