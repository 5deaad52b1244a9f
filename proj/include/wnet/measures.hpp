#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace wnet {

inline constexpr double kMassTolerance = 1e-12;
/// Atoms below this mass in solver output are round-off, not support.
inline constexpr double kAtomCutoff = 1e-14;

/// Finitely supported probability measure on R^n.
///
/// Points are stored flat (point i occupies coords[i*dim, (i+1)*dim)). The
/// constructor enforces the probability-measure invariants: at least one
/// atom, nonnegative weights summing to one within kMassTolerance.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> weights);

  /// Same as the constructor but rescales weights to sum to exactly one first.
  static DiscreteMeasure normalized(std::size_t dim, std::vector<double> coords,
                                    std::vector<double> weights);
  static DiscreteMeasure dirac(std::span<const double> point);
  /// Equal weights on the given points.
  static DiscreteMeasure uniform(std::size_t dim, std::vector<double> coords);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }

  std::span<const double> point(std::size_t i) const {
    return {coords_.data() + i * dim_, dim_};
  }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& coords() const noexcept { return coords_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  std::vector<double> mean() const;
  double second_moment() const;
  DiscreteMeasure translated(std::span<const double> shift) const;

  bool operator==(const DiscreteMeasure&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

/// Axis-aligned box partitioned into a regular grid of cells.
/// Cells are indexed row-major with axis 0 slowest.
struct GridGeometry {
  std::size_t dim = 0;
  std::vector<std::pair<double, double>> box;
  std::vector<std::size_t> resolution;

  void validate() const;
  std::size_t cell_count() const;
  double cell_width(std::size_t axis) const;
  double cell_volume() const;
  double cell_diameter() const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  std::size_t flatten(std::span<const std::size_t> multi) const;
  std::vector<double> cell_center(std::size_t flat) const;
  /// Cell containing x; cells are closed-left/open-right, points outside the
  /// box are clamped to the nearest boundary cell.
  std::size_t locate(std::span<const double> x) const;
  GridGeometry translated(std::span<const double> shift) const;
  GridGeometry dilated(double factor) const;

  bool operator==(const GridGeometry&) const = default;
};

/// Piecewise-constant density on a GridGeometry, stored as cell masses.
class GridMeasure {
 public:
  GridMeasure(GridGeometry geometry, std::vector<double> cell_mass);
  static GridMeasure normalized(GridGeometry geometry, std::vector<double> cell_mass);

  const GridGeometry& geometry() const noexcept { return geometry_; }
  std::size_t dim() const noexcept { return geometry_.dim; }
  const std::vector<double>& cell_mass() const noexcept { return cell_mass_; }
  double density(std::size_t cell) const { return cell_mass_[cell] / geometry_.cell_volume(); }
  double linf_norm() const;
  std::vector<double> mean() const;

  /// Moves the box; cell masses are untouched.
  GridMeasure translated(std::span<const double> shift) const;
  GridMeasure dilated(double factor) const;

  bool operator==(const GridMeasure&) const = default;

 private:
  GridGeometry geometry_;
  std::vector<double> cell_mass_;
};

struct NegEntropy {};
struct Power {
  double exponent;
};
struct RelativeEntropy {
  GridMeasure reference;
};

class EnergyFunctional {
 public:
  using Variant = std::variant<NegEntropy, Power, RelativeEntropy>;

  static EnergyFunctional neg_entropy();
  static EnergyFunctional power(double exponent);
  static EnergyFunctional relative_entropy(GridMeasure reference);

  const Variant& kind() const noexcept { return kind_; }
  std::string name() const;

 private:
  explicit EnergyFunctional(Variant kind) : kind_(std::move(kind)) {}
  Variant kind_;
};

/// Differential entropy of the piecewise-constant density:
/// -sum_c mass_c log(mass_c / vol_c), with 0 log 0 = 0.
double entropy(const GridMeasure& mu);

/// Discrete measures have no Lebesgue density, so their entropy is -inf.
double entropy(const DiscreteMeasure& mu);

double energy(const GridMeasure& mu, const EnergyFunctional& f);

/// Every functional here is +inf off the absolutely continuous measures.
double energy(const DiscreteMeasure& mu, const EnergyFunctional& f);

/// Atoms at cell centers. Empty cells are dropped unless keep_empty is set.
DiscreteMeasure grid_to_discrete(const GridMeasure& mu, bool keep_empty = false);

enum class Deposit {
  Nearest,  // whole atom into the containing cell
  Linear,   // cloud-in-cell: multilinear split between the nearest cell centers
};

/// Mass-preserving binning of a discrete measure onto a grid.
GridMeasure rasterize(const DiscreteMeasure& mu, const GridGeometry& geometry,
                      Deposit deposit = Deposit::Linear);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace wnet
