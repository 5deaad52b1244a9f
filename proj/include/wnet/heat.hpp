#pragma once

#include <cstddef>
#include <optional>

#include "wnet/measures.hpp"

namespace wnet {

/// Largest step the explicit periodic scheme accepts: min_a h_a^2 / (4 n).
double heat_stable_step(const GridGeometry& geometry);

/// One explicit (FTCS) step of d rho/dt = Laplacian(rho) on the grid treated
/// as a torus. Throws UnstableStep if dt exceeds heat_stable_step.
GridMeasure heat_step(const GridMeasure& mu, double dt);

/// Runs the periodic heat equation to `time` using equal steps no larger than
/// `max_dt` (defaults to the stability bound).
GridMeasure heat_flow(const GridMeasure& mu, double time, std::optional<double> max_dt = std::nullopt);

struct StoppedFlowResult {
  GridMeasure measure;
  std::size_t steps = 0;
  bool reached_level = false;
  double final_energy = 0.0;
};

/// Heat steps until energy(mu, f) <= level. Inputs already at or below the
/// level are returned unchanged with steps = 0.
StoppedFlowResult stopped_flow(const GridMeasure& mu, const EnergyFunctional& f, double level,
                               double dt, std::size_t max_steps);

}  // namespace wnet
