#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "wnet/measures.hpp"

namespace wnet {

std::uint64_t splitmix64(std::uint64_t& state);

/// Independent stream for instance `index` of a run seeded with `seed`.
std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index);

/// Seeded generator with distribution code written out, so streams do not
/// depend on the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi);

 private:
  std::mt19937_64 engine_;
};

/// 1..max_points atoms uniform in [0, scale]^dim with random positive weights.
DiscreteMeasure random_discrete(Rng& rng, std::size_t max_points, std::size_t dim, double scale = 1.0);

/// Uniform density on a random axis-aligned block of 1..max_side cells per axis.
GridMeasure random_block(Rng& rng, const GridGeometry& g, std::size_t max_side);

/// Boundary data with finite entropy on a shared grid, cycling through
/// translates of one block, blocks of different sizes, and two-block mixtures.
std::vector<GridMeasure> random_grid_boundary(Rng& rng, const GridGeometry& g, std::size_t k, std::size_t max_side);

/// Block with independent random cell masses in [0.2, 1] (bounded density).
GridMeasure random_density_block(Rng& rng, const GridGeometry& g, std::size_t max_side);

/// 2..max_k boundary measures of 1..max_support atoms each in [0,1]^dim.
std::vector<DiscreteMeasure> random_steiner_instance(Rng& rng, std::size_t max_k, std::size_t max_support,
                                                     std::size_t dim);

}  // namespace wnet
