#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "wnet/corpus.hpp"
#include "wnet/error.hpp"
#include "wnet/heat.hpp"
#include "wnet/transport.hpp"

using namespace wnet;
using doctest::Approx;

namespace {

double total(const GridMeasure& mu) { return std::accumulate(mu.cell_mass().begin(), mu.cell_mass().end(), 0.0); }

// The periodic explicit step is diagonal in the discrete Fourier basis:
// mode k is multiplied by 1 - 4 dt/h^2 sin^2(pi k / N) per step.
std::vector<double> fourier_heat(const std::vector<double>& x, double dt, double h, std::size_t steps) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> hat(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) hat[k] += x[j] * std::polar(1.0, -2 * std::numbers::pi * k * j / n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * k / n);
    hat[k] *= std::pow(1 - 4 * dt / (h * h) * s * s, static_cast<double>(steps));
  }
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::complex<double> v;
    for (std::size_t k = 0; k < n; ++k) v += hat[k] * std::polar(1.0, 2 * std::numbers::pi * k * j / n);
    out[j] = v.real() / n;
  }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("heat");

TEST_CASE("stability bound") {
  const GridGeometry g{2, {{0, 1}, {0, 2}}, {10, 10}};
  CHECK(heat_stable_step(g) == Approx(0.01 / 8));
  const auto mu = GridMeasure::normalized(g, std::vector<double>(100, 1.0));
  CHECK_THROWS_AS(heat_step(mu, 2 * heat_stable_step(g)), Error);
  try {
    heat_step(mu, 1.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnstableStep);
  }
}

TEST_CASE("uniform density is a fixed point") {
  const GridGeometry g{2, {{0, 1}, {0, 1}}, {6, 4}};
  const auto mu = GridMeasure::normalized(g, std::vector<double>(24, 1.0));
  const auto out = heat_flow(mu, 0.3);
  for (double m : out.cell_mass()) CHECK(m == Approx(1.0 / 24).epsilon(1e-14));
}

TEST_CASE("matches the Fourier solution") {
  Rng rng(5);
  const GridGeometry g{1, {{0, 1}}, {16}};
  std::vector<double> x(16);
  for (double& v : x) v = rng.uniform();
  const auto mu = GridMeasure::normalized(g, x);
  const double dt = 0.5 * heat_stable_step(g);
  GridMeasure cur = mu;
  for (int s = 0; s < 25; ++s) cur = heat_step(cur, dt);
  const auto expected = fourier_heat(mu.cell_mass(), dt, g.cell_width(0), 25);
  for (std::size_t c = 0; c < 16; ++c) CHECK(cur.cell_mass()[c] == Approx(expected[c]).epsilon(1e-12));
}

TEST_CASE("mass conserved, entropy nondecreasing") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const std::size_t dim = rng.index(1, 2);
    GridGeometry g{dim, {}, {}};
    for (std::size_t a = 0; a < dim; ++a) {
      g.box.push_back({0, 1});
      g.resolution.push_back(rng.index(4, 16));
    }
    GridMeasure cur = random_block(rng, g, 4);
    double h = entropy(cur);
    for (int s = 0; s < 40; ++s) {
      cur = heat_step(cur, heat_stable_step(g));
      CHECK(total(cur) == Approx(1.0).epsilon(1e-14));
      const double next = entropy(cur);
      CHECK(next >= h - 1e-12);
      h = next;
    }
  }
}

TEST_CASE("stopped flow") {
  const GridGeometry g{2, {{0, 1}, {0, 1}}, {8, 8}};
  std::vector<double> spike(64, 0.0);
  spike[27] = 1.0;
  const GridMeasure mu(g, spike);
  const auto f = EnergyFunctional::neg_entropy();

  const auto fixed = stopped_flow(mu, f, energy(mu, f) + 1.0, heat_stable_step(g), 100);
  CHECK(fixed.steps == 0);
  CHECK(fixed.measure == mu);

  const auto run = stopped_flow(mu, f, 0.0, heat_stable_step(g), 10000);
  REQUIRE(run.reached_level);
  CHECK(run.final_energy <= 0.0);
  // monotone until the level is reached, and the first state at or below it
  GridMeasure cur = mu;
  double e = energy(cur, f);
  for (std::size_t s = 0; s + 1 < run.steps; ++s) {
    cur = heat_step(cur, heat_stable_step(g));
    const double next = energy(cur, f);
    CHECK(next <= e + 1e-12);
    CHECK(next > 0.0);
    e = next;
  }
}

TEST_CASE("non-expansive up to grid error") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(50 + seed);
    const GridGeometry g{2, {{0, 1}, {0, 1}}, {12, 12}};
    const auto mu = random_block(rng, g, 3), nu = random_block(rng, g, 3);
    const double before = w2(grid_to_discrete(mu), grid_to_discrete(nu));
    const double after = w2(grid_to_discrete(heat_flow(mu, 2e-3)), grid_to_discrete(heat_flow(nu, 2e-3)));
    CHECK(after <= before + 2 * g.cell_diameter());
  }
}

TEST_SUITE_END();
