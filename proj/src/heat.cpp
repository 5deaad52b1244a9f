#include "wnet/heat.hpp"

#include <algorithm>
#include <cmath>

#include "wnet/error.hpp"

namespace wnet {

double heat_stable_step(const GridGeometry& geometry) {
  double hmin = geometry.cell_width(0);
  for (std::size_t a = 1; a < geometry.dim; ++a) hmin = std::min(hmin, geometry.cell_width(a));
  return hmin * hmin / (4.0 * static_cast<double>(geometry.dim));
}

GridMeasure heat_step(const GridMeasure& mu, double dt) {
  const auto& g = mu.geometry();
  if (!(dt > 0.0) || dt > heat_stable_step(g) * (1.0 + 1e-12)) {
    throw Error(ErrorKind::UnstableStep, "dt = " + std::to_string(dt) + " exceeds the stability bound " +
                                             std::to_string(heat_stable_step(g)));
  }
  const auto& in = mu.cell_mass();
  std::vector<double> out = in;
  // Row-major strides, axis 0 slowest.
  std::vector<std::size_t> stride(g.dim, 1);
  for (std::size_t a = g.dim - 1; a-- > 0;) stride[a] = stride[a + 1] * g.resolution[a + 1];

  for (std::size_t c = 0; c < in.size(); ++c) {
    double delta = 0.0;
    for (std::size_t a = 0; a < g.dim; ++a) {
      const std::size_t res = g.resolution[a];
      const std::size_t coord = (c / stride[a]) % res;
      const std::size_t base = c - coord * stride[a];
      const std::size_t up = base + ((coord + 1) % res) * stride[a];
      const std::size_t down = base + ((coord + res - 1) % res) * stride[a];
      const double h = g.cell_width(a);
      delta += dt / (h * h) * (in[up] - 2.0 * in[c] + in[down]);
    }
    out[c] = std::max(0.0, in[c] + delta);
  }
  return GridMeasure::normalized(g, std::move(out));
}

GridMeasure heat_flow(const GridMeasure& mu, double time, std::optional<double> max_dt) {
  if (!(time > 0.0)) throw Error(ErrorKind::InvalidArgument, "heat flow time must be positive");
  const double cap = max_dt.value_or(heat_stable_step(mu.geometry()));
  const auto steps = static_cast<std::size_t>(std::ceil(time / cap - 1e-12));
  const double dt = time / static_cast<double>(std::max<std::size_t>(steps, 1));
  GridMeasure current = mu;
  for (std::size_t s = 0; s < std::max<std::size_t>(steps, 1); ++s) current = heat_step(current, dt);
  return current;
}

StoppedFlowResult stopped_flow(const GridMeasure& mu, const EnergyFunctional& f, double level, double dt,
                               std::size_t max_steps) {
  StoppedFlowResult result{mu, 0, false, energy(mu, f)};
  if (result.final_energy <= level) {
    result.reached_level = true;
    return result;
  }
  while (result.steps < max_steps) {
    result.measure = heat_step(result.measure, dt);
    ++result.steps;
    result.final_energy = energy(result.measure, f);
    if (result.final_energy <= level) {
      result.reached_level = true;
      break;
    }
  }
  return result;
}

}  // namespace wnet
