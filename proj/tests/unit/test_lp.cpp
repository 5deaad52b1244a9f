#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "wnet/corpus.hpp"
#include "wnet/lp.hpp"

using namespace wnet;
using doctest::Approx;

namespace {

lp::Problem dense_problem(const std::vector<std::vector<double>>& a, std::vector<double> b, std::vector<double> c) {
  lp::Problem p{lp::SparseColumns(a.size()), std::move(b), std::move(c)};
  for (std::size_t j = 0; j < p.c.size(); ++j) {
    std::vector<std::pair<std::size_t, double>> col;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i][j] != 0.0) col.push_back({i, a[i][j]});
    p.a.add_column(col);
  }
  return p;
}

// Transportation LP with the marginal constraints written out row by row.
lp::Problem transport_problem(const std::vector<double>& r, const std::vector<double>& s, const std::vector<double>& cost) {
  const std::size_t m = r.size(), n = s.size();
  lp::Problem p{lp::SparseColumns(m + n), r, cost};
  p.b.insert(p.b.end(), s.begin(), s.end());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::pair<std::size_t, double> col[] = {{i, 1.0}, {m + j, 1.0}};
      p.a.add_column(col);
    }
  return p;
}

}  // namespace

TEST_SUITE_BEGIN("lp");

TEST_CASE("small problem with known optimum") {
  // min -x - 2y  s.t. x + y + s1 = 4, x + 3y + s2 = 6
  const auto p = dense_problem({{1, 1, 1, 0}, {1, 3, 0, 1}}, {4, 6}, {-1, -2, 0, 0});
  const auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == Approx(-5.0));
  CHECK(sol.x[0] == Approx(3.0));
  CHECK(sol.x[1] == Approx(1.0));
  CHECK(sol.dual_objective == Approx(sol.objective).epsilon(1e-12));
  CHECK(sol.dual_infeasibility <= 1e-12);
}

TEST_CASE("infeasible and unbounded") {
  CHECK(lp::solve(dense_problem({{1, 1}}, {-1}, {1, 1})).status == lp::Status::Infeasible);
  CHECK(lp::solve(dense_problem({{1, -1}}, {1}, {-1, 0})).status == lp::Status::Unbounded);
}

TEST_CASE("redundant rows are tolerated") {
  // the transportation rows always carry one redundancy
  const auto sol = lp::solve(transport_problem({0.5, 0.5}, {0.25, 0.75}, {0, 1, 1, 0}));
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == Approx(0.25));
  // an explicitly duplicated row
  const auto dup = lp::solve(dense_problem({{1, 1, 0}, {1, 1, 0}, {0, 1, 1}}, {1, 1, 1}, {1, 2, 0}));
  REQUIRE(dup.status == lp::Status::Optimal);
  CHECK(dup.objective == Approx(1.0));
}

TEST_CASE("degenerate problem that cycles under plain Dantzig pricing") {
  // Beale's example in equality form.
  const auto p = dense_problem({{0.25, -8, -1, 9, 1, 0, 0}, {0.5, -12, -0.5, 3, 0, 1, 0}, {0, 0, 1, 0, 0, 0, 1}},
                               {0, 0, 1}, {-0.75, 20, -0.5, 6, 0, 0, 0});
  const auto sol = lp::solve(p);
  REQUIRE(sol.status == lp::Status::Optimal);
  CHECK(sol.objective == Approx(-1.25));
}

TEST_CASE("transportation LPs agree with vertex enumeration") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Rng rng(seed);
    const std::size_t m = rng.index(1, 4), n = rng.index(1, 4);
    std::vector<double> r(m), s(n), c(m * n);
    for (double& x : r) x = rng.uniform(0.1, 1);
    for (double& x : s) x = rng.uniform(0.1, 1);
    double sr = 0, ss = 0;
    for (double x : r) sr += x;
    for (double x : s) ss += x;
    for (double& x : r) x /= sr;
    for (double& x : s) x /= ss;
    for (double& x : c) x = rng.uniform(0, 5);
    const auto sol = lp::solve(transport_problem(r, s, c));
    REQUIRE(sol.status == lp::Status::Optimal);
    const double expected = oracle::TransportEnumerator(r, s, c).minimum();
    CHECK(sol.objective == Approx(expected).epsilon(1e-10));
    CHECK(std::abs(sol.objective - sol.dual_objective) <= 1e-10);
    for (double x : sol.x) CHECK(x >= -1e-12);
  }
}

TEST_CASE("deterministic reruns") {
  const auto p = transport_problem({0.25, 0.25, 0.5}, {0.5, 0.5}, {1, 1, 1, 1, 1, 1});
  const auto a = lp::solve(p), b = lp::solve(p);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
}

TEST_SUITE_END();
