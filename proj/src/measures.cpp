#include "wnet/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wnet/error.hpp"

namespace wnet {

namespace {

double kahan_sum(std::span<const double> xs) {
  double sum = 0.0, carry = 0.0;
  for (double x : xs) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  return sum;
}

void check_weights(std::span<const double> weights, const char* what) {
  if (weights.empty()) throw Error(ErrorKind::InvalidMeasure, std::string(what) + " is empty");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorKind::InvalidMeasure, std::string(what) + " has a negative or non-finite entry");
    }
  }
  const double total = kahan_sum(weights);
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw Error(ErrorKind::InvalidMeasure,
                std::string(what) + " sums to " + std::to_string(total) + ", expected 1");
  }
}

std::vector<double> rescaled(std::vector<double> weights) {
  const double total = kahan_sum(weights);
  if (!(total > 0.0)) throw Error(ErrorKind::InvalidMeasure, "total mass must be positive");
  for (double& w : weights) w /= total;
  return weights;
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteMeasure

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<double> coords,
                                 std::vector<double> weights)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
  if (dim_ == 0) throw Error(ErrorKind::InvalidMeasure, "dimension must be positive");
  if (coords_.size() != dim_ * weights_.size()) {
    throw Error(ErrorKind::InvalidMeasure, "points and weights have different lengths");
  }
  for (double c : coords_) {
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidMeasure, "non-finite coordinate");
  }
  check_weights(weights_, "weights");
}

DiscreteMeasure DiscreteMeasure::normalized(std::size_t dim, std::vector<double> coords,
                                            std::vector<double> weights) {
  return DiscreteMeasure(dim, std::move(coords), rescaled(std::move(weights)));
}

DiscreteMeasure DiscreteMeasure::dirac(std::span<const double> point) {
  return DiscreteMeasure(point.size(), std::vector<double>(point.begin(), point.end()), {1.0});
}

DiscreteMeasure DiscreteMeasure::uniform(std::size_t dim, std::vector<double> coords) {
  if (dim == 0 || coords.size() % dim != 0 || coords.empty()) {
    throw Error(ErrorKind::InvalidMeasure, "coordinate count is not a multiple of dim");
  }
  const std::size_t n = coords.size() / dim;
  return normalized(dim, std::move(coords), std::vector<double>(n, 1.0));
}

std::vector<double> DiscreteMeasure::mean() const {
  std::vector<double> m(dim_, 0.0);
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t a = 0; a < dim_; ++a) m[a] += weights_[i] * coords_[i * dim_ + a];
  }
  return m;
}

double DiscreteMeasure::second_moment() const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    double r2 = 0.0;
    for (double c : point(i)) r2 += c * c;
    s += weights_[i] * r2;
  }
  return s;
}

DiscreteMeasure DiscreteMeasure::translated(std::span<const double> shift) const {
  if (shift.size() != dim_) throw Error(ErrorKind::DimensionMismatch, "shift has wrong dimension");
  std::vector<double> c = coords_;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t a = 0; a < dim_; ++a) c[i * dim_ + a] += shift[a];
  }
  return DiscreteMeasure(dim_, std::move(c), weights_);
}

// ---------------------------------------------------------------------------
// GridGeometry

void GridGeometry::validate() const {
  if (dim == 0) throw Error(ErrorKind::InvalidMeasure, "grid dimension must be positive");
  if (box.size() != dim || resolution.size() != dim) {
    throw Error(ErrorKind::InvalidMeasure, "box/resolution length differs from dim");
  }
  for (std::size_t a = 0; a < dim; ++a) {
    if (!(box[a].second > box[a].first) || !std::isfinite(box[a].first) ||
        !std::isfinite(box[a].second)) {
      throw Error(ErrorKind::InvalidMeasure, "grid box must have high > low on every axis");
    }
    if (resolution[a] == 0) throw Error(ErrorKind::InvalidMeasure, "grid resolution must be positive");
  }
}

std::size_t GridGeometry::cell_count() const {
  std::size_t n = 1;
  for (std::size_t r : resolution) n *= r;
  return n;
}

double GridGeometry::cell_width(std::size_t axis) const {
  return (box[axis].second - box[axis].first) / static_cast<double>(resolution[axis]);
}

double GridGeometry::cell_volume() const {
  double v = 1.0;
  for (std::size_t a = 0; a < dim; ++a) v *= cell_width(a);
  return v;
}

double GridGeometry::cell_diameter() const {
  double s = 0.0;
  for (std::size_t a = 0; a < dim; ++a) s += cell_width(a) * cell_width(a);
  return std::sqrt(s);
}

std::vector<std::size_t> GridGeometry::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(dim);
  for (std::size_t a = dim; a-- > 0;) {
    idx[a] = flat % resolution[a];
    flat /= resolution[a];
  }
  return idx;
}

std::size_t GridGeometry::flatten(std::span<const std::size_t> multi) const {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < dim; ++a) flat = flat * resolution[a] + multi[a];
  return flat;
}

std::vector<double> GridGeometry::cell_center(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::vector<double> c(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    c[a] = box[a].first + (static_cast<double>(idx[a]) + 0.5) * cell_width(a);
  }
  return c;
}

std::size_t GridGeometry::locate(std::span<const double> x) const {
  std::vector<std::size_t> idx(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const double u = std::floor((x[a] - box[a].first) / cell_width(a));
    const double hi = static_cast<double>(resolution[a] - 1);
    idx[a] = static_cast<std::size_t>(std::clamp(u, 0.0, hi));
  }
  return flatten(idx);
}

GridGeometry GridGeometry::translated(std::span<const double> shift) const {
  GridGeometry g = *this;
  for (std::size_t a = 0; a < dim; ++a) {
    g.box[a].first += shift[a];
    g.box[a].second += shift[a];
  }
  return g;
}

GridGeometry GridGeometry::dilated(double factor) const {
  GridGeometry g = *this;
  for (auto& [lo, hi] : g.box) {
    lo *= factor;
    hi *= factor;
  }
  return g;
}

// ---------------------------------------------------------------------------
// GridMeasure

GridMeasure::GridMeasure(GridGeometry geometry, std::vector<double> cell_mass)
    : geometry_(std::move(geometry)), cell_mass_(std::move(cell_mass)) {
  geometry_.validate();
  if (cell_mass_.size() != geometry_.cell_count()) {
    throw Error(ErrorKind::InvalidMeasure, "cell_mass length does not match the resolution");
  }
  check_weights(cell_mass_, "cell_mass");
}

GridMeasure GridMeasure::normalized(GridGeometry geometry, std::vector<double> cell_mass) {
  return GridMeasure(std::move(geometry), rescaled(std::move(cell_mass)));
}

double GridMeasure::linf_norm() const {
  return *std::max_element(cell_mass_.begin(), cell_mass_.end()) / geometry_.cell_volume();
}

std::vector<double> GridMeasure::mean() const {
  std::vector<double> m(dim(), 0.0);
  for (std::size_t c = 0; c < cell_mass_.size(); ++c) {
    if (cell_mass_[c] == 0.0) continue;
    const auto x = geometry_.cell_center(c);
    for (std::size_t a = 0; a < dim(); ++a) m[a] += cell_mass_[c] * x[a];
  }
  return m;
}

GridMeasure GridMeasure::translated(std::span<const double> shift) const {
  if (shift.size() != dim()) throw Error(ErrorKind::DimensionMismatch, "shift has wrong dimension");
  return GridMeasure(geometry_.translated(shift), cell_mass_);
}

GridMeasure GridMeasure::dilated(double factor) const {
  return GridMeasure(geometry_.dilated(factor), cell_mass_);
}

// ---------------------------------------------------------------------------
// Functionals

EnergyFunctional EnergyFunctional::neg_entropy() { return EnergyFunctional(NegEntropy{}); }

EnergyFunctional EnergyFunctional::power(double exponent) {
  if (!(exponent > 1.0)) throw Error(ErrorKind::InvalidArgument, "power exponent must exceed 1");
  return EnergyFunctional(Power{exponent});
}

EnergyFunctional EnergyFunctional::relative_entropy(GridMeasure reference) {
  for (double m : reference.cell_mass()) {
    if (!(m > 0.0)) {
      throw Error(ErrorKind::InvalidArgument, "relative entropy reference must be positive on every cell");
    }
  }
  return EnergyFunctional(RelativeEntropy{std::move(reference)});
}

std::string EnergyFunctional::name() const {
  struct Visitor {
    std::string operator()(const NegEntropy&) const { return "neg-entropy"; }
    std::string operator()(const Power& p) const { return "power:" + std::to_string(p.exponent); }
    std::string operator()(const RelativeEntropy&) const { return "relative-entropy"; }
  };
  return std::visit(Visitor{}, kind_);
}

double entropy(const GridMeasure& mu) {
  const double vol = mu.geometry().cell_volume();
  double h = 0.0;
  for (double m : mu.cell_mass()) {
    if (m > 0.0) h -= m * std::log(m / vol);
  }
  return h;
}

double entropy(const DiscreteMeasure&) { return -kInfinity; }

double energy(const GridMeasure& mu, const EnergyFunctional& f) {
  const double vol = mu.geometry().cell_volume();
  struct Visitor {
    const GridMeasure& mu;
    double vol;
    double operator()(const NegEntropy&) const { return -entropy(mu); }
    double operator()(const Power& p) const {
      double s = 0.0;
      for (double m : mu.cell_mass()) {
        if (m > 0.0) s += vol * std::pow(m / vol, p.exponent);
      }
      return s;
    }
    double operator()(const RelativeEntropy& r) const {
      if (!(r.reference.geometry() == mu.geometry())) {
        throw Error(ErrorKind::GeometryMismatch, "reference grid differs from the measure's grid");
      }
      double s = 0.0;
      const auto& ref = r.reference.cell_mass();
      for (std::size_t c = 0; c < ref.size(); ++c) {
        const double m = mu.cell_mass()[c];
        if (m > 0.0) s += m * std::log(m / ref[c]);
      }
      return s;
    }
  };
  return std::visit(Visitor{mu, vol}, f.kind());
}

double energy(const DiscreteMeasure&, const EnergyFunctional&) { return kInfinity; }

DiscreteMeasure grid_to_discrete(const GridMeasure& mu, bool keep_empty) {
  const auto& g = mu.geometry();
  std::vector<double> coords;
  std::vector<double> weights;
  for (std::size_t c = 0; c < mu.cell_mass().size(); ++c) {
    const double m = mu.cell_mass()[c];
    if (m == 0.0 && !keep_empty) continue;
    const auto x = g.cell_center(c);
    coords.insert(coords.end(), x.begin(), x.end());
    weights.push_back(m);
  }
  return DiscreteMeasure(g.dim, std::move(coords), std::move(weights));
}

GridMeasure rasterize(const DiscreteMeasure& mu, const GridGeometry& geometry, Deposit deposit) {
  geometry.validate();
  if (mu.dim() != geometry.dim) throw Error(ErrorKind::DimensionMismatch, "measure/grid dimension");
  const std::size_t dim = geometry.dim;
  std::vector<double> mass(geometry.cell_count(), 0.0);

  if (deposit == Deposit::Nearest) {
    for (std::size_t i = 0; i < mu.size(); ++i) mass[geometry.locate(mu.point(i))] += mu.weight(i);
    return GridMeasure::normalized(geometry, std::move(mass));
  }

  std::vector<std::size_t> lo(dim), hi(dim), idx(dim);
  std::vector<double> frac(dim);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto x = mu.point(i);
    for (std::size_t a = 0; a < dim; ++a) {
      const double u = (x[a] - geometry.box[a].first) / geometry.cell_width(a) - 0.5;
      const double last = static_cast<double>(geometry.resolution[a] - 1);
      const double base = std::floor(u);
      frac[a] = u - base;
      lo[a] = static_cast<std::size_t>(std::clamp(base, 0.0, last));
      hi[a] = static_cast<std::size_t>(std::clamp(base + 1.0, 0.0, last));
    }
    for (std::size_t corner = 0; corner < (std::size_t{1} << dim); ++corner) {
      double w = mu.weight(i);
      for (std::size_t a = 0; a < dim; ++a) {
        const bool upper = (corner >> a) & 1U;
        w *= upper ? frac[a] : 1.0 - frac[a];
        idx[a] = upper ? hi[a] : lo[a];
      }
      if (w != 0.0) mass[geometry.flatten(idx)] += w;
    }
  }
  return GridMeasure::normalized(geometry, std::move(mass));
}

}  // namespace wnet
