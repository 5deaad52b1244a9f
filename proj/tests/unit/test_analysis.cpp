#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "wnet/analysis.hpp"
#include "wnet/corpus.hpp"
#include "wnet/error.hpp"

using namespace wnet;
using doctest::Approx;

namespace {

constexpr double kThird = 2 * std::numbers::pi / 3;

GridMeasure block(const GridGeometry& g, std::size_t lo, std::size_t hi) {
  std::vector<double> cells(g.cell_count(), 0.0);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const auto m = g.unflatten(c);
    bool in = true;
    for (std::size_t a : m) in = in && a >= lo && a < hi;
    if (in) cells[c] = 1.0;
  }
  return GridMeasure::normalized(g, cells);
}

GridMeasure shifted_block(const GridGeometry& g, std::vector<std::size_t> lo, std::size_t side) {
  std::vector<double> cells(g.cell_count(), 0.0);
  for (std::size_t c = 0; c < g.cell_count(); ++c) {
    const auto m = g.unflatten(c);
    bool in = true;
    for (std::size_t a = 0; a < m.size(); ++a) in = in && m[a] >= lo[a] && m[a] < lo[a] + side;
    if (in) cells[c] = 1.0;
  }
  return GridMeasure::normalized(g, cells);
}

// 3x3 lattice of atoms, rotated by `angle` and centred at c.
DiscreteMeasure rotated_block(double angle, std::vector<double> c) {
  std::vector<double> coords;
  for (int i = -1; i <= 1; ++i)
    for (int j = -1; j <= 1; ++j) {
      const double x = 0.08 * i + 0.03 * j * j, y = 0.1 * j;
      coords.push_back(c[0] + std::cos(angle) * x - std::sin(angle) * y);
      coords.push_back(c[1] + std::sin(angle) * x + std::cos(angle) * y);
    }
  return DiscreteMeasure::uniform(2, coords);
}

}  // namespace

TEST_SUITE_BEGIN("analysis");

TEST_CASE("grid tolerance") {
  const GridGeometry g{2, {{0, 1}, {0, 1}}, {10, 10}};
  const double d = std::sqrt(0.02);
  CHECK(GridTolerance::evaluate(g, 0.0) == Approx(GridTolerance::c1 * d));
  CHECK(GridTolerance::evaluate(g, 2.0) == Approx(GridTolerance::c1 * d + 2 * GridTolerance::c2 * d * d));
  const GridGeometry line{1, {{0, 1}}, {4}};
  CHECK(log_density_variation(GridMeasure(line, {0.1, 0.4, 0.0, 0.5})) == Approx(std::log(5.0)));
}

TEST_CASE("max principle: translates of one block") {
  const GridGeometry g{2, {{0, 1}, {0, 1}}, {16, 16}};
  const std::vector<GridMeasure> b{shifted_block(g, {1, 1}, 3), shifted_block(g, {1, 11}, 3),
                                   shifted_block(g, {11, 6}, 3)};
  const auto s = solve_best_network(b, false);
  const auto r = verify_max_principle(s, EnergyFunctional::neg_entropy(), 21, g);
  CHECK(r.pass);
  CHECK(r.margin <= r.tolerance);
  CHECK(r.boundary_max == Approx(energy(b[0], EnergyFunctional::neg_entropy())));
  CHECK(r.profile.size() == 21 * s.topology.edges.size());
  double top = -kInfinity;
  for (const auto& p : r.profile) top = std::max(top, p.energy);
  CHECK(r.network_max == top);
  CHECK(r.tolerance == Approx(GridTolerance::evaluate(g, 0.0)));
}

TEST_CASE("max principle: dilation geodesic") {
  const GridGeometry g{1, {{0, 2.5}}, {40}};
  const auto narrow = block(g, 0, 16);  // uniform on [0, 1]
  const auto wide = block(g, 0, 32);    // uniform on [0, 2]
  const auto s = optimize_network(enumerate_topologies(2, false)[0], std::vector<GridMeasure>{narrow, wide});
  const auto r = verify_max_principle(s, EnergyFunctional::neg_entropy(), 21, g);
  CHECK(r.boundary_max == Approx(0.0).epsilon(1e-12));
  CHECK(r.network_max <= 0.0 + r.tolerance);
  CHECK(r.pass);

  const std::string csv = r.csv();
  CHECK(csv.rfind("edge_id,t,energy\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 22);

  const auto strict = verify_max_principle(s, EnergyFunctional::neg_entropy(), 21, g, 0.0);
  CHECK(strict.tolerance == 0.0);
  CHECK_THROWS_AS(verify_max_principle(s, EnergyFunctional::neg_entropy(), 1, g), Error);
}

TEST_CASE("max principle: atomic boundary is vacuous") {
  const std::vector<DiscreteMeasure> b{DiscreteMeasure::dirac(std::vector<double>{0.2}),
                                       DiscreteMeasure::dirac(std::vector<double>{0.7})};
  const auto s = optimize_network(enumerate_topologies(2, false)[0], b);
  const auto r = verify_max_principle(s, EnergyFunctional::neg_entropy(), 5, GridGeometry{1, {{0, 1}}, {10}});
  CHECK(r.infinite_boundary);
  CHECK(r.pass);
}

TEST_CASE("barycentric max principle") {
  const GridGeometry g{1, {{0, 1}}, {32}};
  const auto a = block(g, 4, 10);
  const auto bar_same = exact_barycenter({grid_to_discrete(a), grid_to_discrete(a)}, StarWeights({1, 2})).measure;
  const auto same = verify_barycentric_max_principle({a, a}, StarWeights({1, 2}), bar_same,
                                                     EnergyFunctional::neg_entropy());
  CHECK(same.barycenter_energy == Approx(same.weighted_average).epsilon(1e-12));
  CHECK(same.pass);

  // translate by an even number of cells: the barycenter lands on cell centres
  const auto b = shifted_block(g, {14}, 6);
  const auto bar = exact_barycenter({grid_to_discrete(a), grid_to_discrete(b)}, StarWeights({1, 1})).measure;
  const auto tr = verify_barycentric_max_principle({a, b}, StarWeights({1, 1}), bar, EnergyFunctional::neg_entropy());
  CHECK(std::abs(tr.barycenter_energy - tr.weighted_average) <= tr.tolerance);

  const auto wide = shifted_block(g, {12}, 16);
  const auto bar2 = exact_barycenter({grid_to_discrete(a), grid_to_discrete(wide)}, StarWeights({1, 1})).measure;
  const auto pw = verify_barycentric_max_principle({a, wide}, StarWeights({1, 1}), bar2, EnergyFunctional::power(2));
  CHECK(pw.barycenter_energy < pw.weighted_average);
  CHECK(pw.pass);

  CHECK_THROWS_AS(verify_barycentric_max_principle({a, GridMeasure(GridGeometry{1, {{0, 1}}, {8}},
                                                                   std::vector<double>(8, 0.125))},
                                                   StarWeights({1, 1}), bar, EnergyFunctional::neg_entropy()),
                  Error);
}

TEST_CASE("tangent angles") {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const auto nu = random_discrete(rng, 5, 2);
    const std::vector<double> u{rng.uniform(-1, 1), rng.uniform(-1, 1)}, v{rng.uniform(-1, 1), rng.uniform(-1, 1)};
    CHECK(tangent_angle(nu, nu.translated(u), nu.translated(v)) ==
          Approx(oracle::euclidean_angle(u, v)).epsilon(1e-9));
    CHECK(tangent_angle(nu, nu.translated(u), nu.translated(u)) == Approx(0.0).epsilon(1e-6));
  }
  const auto nu = DiscreteMeasure(1, {0, 1}, {0.5, 0.5});
  try {
    tangent_angle(nu, nu, nu.translated(std::vector<double>{1.0}));
    FAIL("expected ZeroDisplacement");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ZeroDisplacement);
  }
}

TEST_CASE("angles at a symmetric vertex") {
  std::vector<DiscreteMeasure> b;
  for (int i = 0; i < 3; ++i) {
    const double phi = kThird * i;
    b.push_back(rotated_block(phi, {std::cos(phi + std::numbers::pi / 2), std::sin(phi + std::numbers::pi / 2)}));
  }
  const auto s = optimize_network(enumerate_topologies(3, false)[0], b);
  REQUIRE(s.topology.free.size() == 1);
  const auto r = angle_at_vertex(s, 3);
  REQUIRE(r.angles.size() == 3);
  CHECK(r.spread);
  for (double a : r.angles) {
    CHECK(a >= 0.0);
    CHECK(a <= std::numbers::pi);
    CHECK(std::abs(a - kThird) <= 0.05);
  }
  CHECK(r.max_deviation <= 0.05);
  if (r.coplanar) CHECK(r.angle_sum == Approx(2 * std::numbers::pi).epsilon(0.1 / (2 * std::numbers::pi)));
}

TEST_CASE("L-infinity bounds") {
  const GridGeometry g{2, {{0, 1}, {0, 1}}, {16, 16}};
  const auto mu1 = shifted_block(g, {2, 2}, 4), mu2 = shifted_block(g, {8, 6}, 4);
  const auto bar = exact_barycenter({grid_to_discrete(mu1), grid_to_discrete(mu2)}, StarWeights({0.25, 0.25}));
  const auto raster = rasterize(bar.measure, g);
  const auto r = check_linfty(raster, {mu1, mu2}, {0.25, 0.25}, LinftyA1{});
  CHECK(r.norm == Approx(mu1.linf_norm()).epsilon(1e-12));
  CHECK(r.bound == Approx(16 * mu1.linf_norm()).epsilon(1e-12));
  CHECK(r.pass);
  // raw weights are rescaled to sum to 1/2
  CHECK(check_linfty(raster, {mu1, mu2}, {3, 3}, LinftyA1{}).bound == Approx(r.bound));

  const auto single = check_linfty(mu1, {mu1}, {0.5}, LinftyA1{});
  CHECK(single.bound == Approx(4 * mu1.linf_norm()));
  CHECK(single.pass);

  const auto in = check_linfty(raster, {mu1, mu2}, {1, 1}, LinftyInterior{3, 2.0, 1.0});
  CHECK(in.bound == Approx(std::pow(12.0, 6.0) * mu1.linf_norm()));
  const auto gl = check_linfty(raster, {mu1, mu2}, {1, 1}, LinftyGlobal{3, 2.0, 1.0, 2.0});
  CHECK(gl.bound == Approx(std::max(4.0, std::pow(6.0, 6.0)) * mu1.linf_norm()));
  CHECK_THROWS_AS(check_linfty(raster, {mu1, mu2}, {1, 1}, LinftyGlobal{3, 2.0, 1.0, 1.0}), Error);

  const GridGeometry other{2, {{0, 1}, {0, 1}}, {8, 8}};
  CHECK_THROWS_AS(check_linfty(raster, {mu1, GridMeasure::normalized(other, std::vector<double>(64, 1.0))}, {1, 1},
                               LinftyA1{}),
                  Error);

  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(instance_seed(11, seed));
    const GridGeometry line{1, {{0, 1}}, {rng.index(8, 64)}};
    const auto a = random_density_block(rng, line, 12), b = random_density_block(rng, line, 12);
    const std::vector<double> sig{rng.uniform(0.1, 1), rng.uniform(0.1, 1)};
    const auto m = exact_barycenter({grid_to_discrete(a), grid_to_discrete(b)}, StarWeights(sig)).measure;
    CHECK(check_linfty(rasterize(m, line), {a, b}, sig, LinftyA1{}).pass);
  }
}

TEST_CASE("counterexample certificate") {
  const auto c = counterexample_demo();
  CHECK(c.pass);
  CHECK(c.cost_a == Approx(2.0));
  CHECK(c.cost_b == Approx(2.0));
  for (double d : {c.d1a, c.d1b, c.d2a, c.d2b}) CHECK(d == Approx(std::sqrt(2.0) / 2).epsilon(1e-12));
  CHECK(c.mutual == Approx(1.0).epsilon(1e-12));
  CHECK(c.reflection_swaps);
  CHECK(c.nu_a == DiscreteMeasure(2, {-0.5, -0.5, 0.5, 0.5}, {0.5, 0.5}));
  CHECK(c.nu_b == DiscreteMeasure(2, {-0.5, 0.5, 0.5, -0.5}, {0.5, 0.5}));
  const auto again = counterexample_demo();
  CHECK(again.nu_a == c.nu_a);
  CHECK(again.mutual == c.mutual);
}

TEST_SUITE_END();
