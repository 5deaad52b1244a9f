#include "wnet/corpus.hpp"

#include <algorithm>

#include "wnet/error.hpp"

namespace wnet {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t instance_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t state = seed ^ (index * 0xd1b54a32d192ed03ULL);
  splitmix64(state);
  return splitmix64(state);
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::size_t Rng::index(std::size_t lo, std::size_t hi) {
  if (hi < lo) throw Error(ErrorKind::InvalidArgument, "empty index range");
  return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1));
}

DiscreteMeasure random_discrete(Rng& rng, std::size_t max_points, std::size_t dim, double scale) {
  const std::size_t n = rng.index(1, max_points);
  std::vector<double> coords(n * dim), weights(n);
  for (double& c : coords) c = rng.uniform(0.0, scale);
  for (double& w : weights) w = rng.uniform(0.1, 1.0);
  return DiscreteMeasure::normalized(dim, std::move(coords), std::move(weights));
}

namespace {

struct Block {
  std::vector<std::size_t> start, side;
};

Block random_shape(Rng& rng, const GridGeometry& g, std::size_t max_side) {
  Block b;
  for (std::size_t a = 0; a < g.dim; ++a) b.side.push_back(rng.index(1, std::min(max_side, g.resolution[a])));
  return b;
}

void place(Rng& rng, const GridGeometry& g, Block& b) {
  b.start.clear();
  for (std::size_t a = 0; a < g.dim; ++a) b.start.push_back(rng.index(0, g.resolution[a] - b.side[a]));
}

std::vector<double> paint(const GridGeometry& g, const Block& b, double mass) {
  std::vector<double> cells(g.cell_count(), 0.0);
  std::size_t n = 1;
  for (std::size_t s : b.side) n *= s;
  std::vector<std::size_t> multi(g.dim);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t rest = k;
    for (std::size_t a = g.dim; a-- > 0;) {
      multi[a] = b.start[a] + rest % b.side[a];
      rest /= b.side[a];
    }
    cells[g.flatten(multi)] += mass / static_cast<double>(n);
  }
  return cells;
}

}  // namespace

GridMeasure random_block(Rng& rng, const GridGeometry& g, std::size_t max_side) {
  Block b = random_shape(rng, g, max_side);
  place(rng, g, b);
  return GridMeasure::normalized(g, paint(g, b, 1.0));
}

std::vector<GridMeasure> random_grid_boundary(Rng& rng, const GridGeometry& g, std::size_t k, std::size_t max_side) {
  std::vector<GridMeasure> out;
  switch (rng.index(0, 2)) {
    case 0: {
      Block b = random_shape(rng, g, max_side);
      for (std::size_t i = 0; i < k; ++i) {
        place(rng, g, b);
        out.push_back(GridMeasure::normalized(g, paint(g, b, 1.0)));
      }
      break;
    }
    case 1:
      for (std::size_t i = 0; i < k; ++i) out.push_back(random_block(rng, g, max_side));
      break;
    default:
      for (std::size_t i = 0; i < k; ++i) {
        const std::size_t half = std::max<std::size_t>(1, max_side / 2 + 1);
        Block b1 = random_shape(rng, g, half), b2 = random_shape(rng, g, half);
        place(rng, g, b1);
        place(rng, g, b2);
        const double alpha = rng.uniform(0.2, 0.8);
        auto cells = paint(g, b1, alpha);
        const auto other = paint(g, b2, 1.0 - alpha);
        for (std::size_t c = 0; c < cells.size(); ++c) cells[c] += other[c];
        out.push_back(GridMeasure::normalized(g, std::move(cells)));
      }
  }
  return out;
}

GridMeasure random_density_block(Rng& rng, const GridGeometry& g, std::size_t max_side) {
  Block b = random_shape(rng, g, max_side);
  place(rng, g, b);
  auto cells = paint(g, b, 1.0);
  for (double& c : cells) {
    if (c > 0.0) c *= rng.uniform(0.2, 1.0);
  }
  return GridMeasure::normalized(g, std::move(cells));
}

std::vector<DiscreteMeasure> random_steiner_instance(Rng& rng, std::size_t max_k, std::size_t max_support,
                                                     std::size_t dim) {
  const std::size_t k = rng.index(2, max_k);
  std::vector<DiscreteMeasure> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(random_discrete(rng, max_support, dim));
  return out;
}

}  // namespace wnet
