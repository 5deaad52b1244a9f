#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wnet/measures.hpp"

namespace wnet {

/// Positive star weights sigma_1..sigma_l, l >= 2.
class StarWeights {
 public:
  explicit StarWeights(std::vector<double> sigmas);

  std::size_t size() const noexcept { return sigmas_.size(); }
  double operator[](std::size_t i) const { return sigmas_[i]; }
  std::span<const double> sigmas() const noexcept { return sigmas_; }
  double total() const noexcept { return total_; }

  /// Rescaled so the weights sum to 1/2 (the L-infinity bound convention).
  StarWeights normalized_to_half() const;

 private:
  std::vector<double> sigmas_;
  double total_;
};

using PointList = std::vector<std::vector<double>>;

/// sum_i sigma_i x_i / sum_i sigma_i
std::vector<double> barycenter_point(const PointList& xs, const StarWeights& w);

/// sum_i sigma_i |x_i - barycenter_point(xs, w)|^2
double star_cost(const PointList& xs, const StarWeights& w);

/// Sparse coupling of l marginals: atoms are index tuples into the marginal supports.
struct MultiPlan {
  struct Atom {
    std::vector<std::size_t> idx;
    double mass = 0.0;
  };
  std::vector<DiscreteMeasure> marginals;
  std::vector<Atom> atoms;
  double cost_value = 0.0;
  double duality_gap = 0.0;

  /// Largest deviation of a single-coordinate pushforward from its marginal.
  double marginal_error() const;
};

inline constexpr std::size_t kDefaultProductCap = 1'000'000;

/// Exact multi-marginal Kantorovich problem for the star cost, solved as an LP
/// over the full product of supports. Throws InstanceTooLarge above the cap.
MultiPlan solve_multimarginal(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                              std::size_t product_cap = kDefaultProductCap);

/// Image of the plan under (x_1..x_l) -> barycenter_point; coincident atoms merged.
DiscreteMeasure pushforward_barycenter(const MultiPlan& plan, const StarWeights& w);

/// Psi(nu) = sum_i sigma_i W2^2(mu_i, nu).
double psi(const std::vector<DiscreteMeasure>& mus, const StarWeights& w, const DiscreteMeasure& nu);

struct BarycenterResult {
  DiscreteMeasure measure;
  double psi = 0.0;
  double duality_gap = 0.0;
};

/// Exact barycenter on a fixed candidate support: weights minimizing Psi,
/// found as one LP over the l couplings into the support.
BarycenterResult fixed_support_barycenter(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                                          const PointList& support,
                                          std::size_t variable_cap = kDefaultProductCap);

/// Every tuple barycenter of the product support (the candidate support on
/// which the fixed-support and multi-marginal minima coincide).
PointList tuple_barycenters(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                            std::size_t product_cap = kDefaultProductCap);

/// Pushforward of an optimal multi-marginal plan: an exact discrete barycenter.
BarycenterResult exact_barycenter(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                                  std::size_t product_cap = kDefaultProductCap);

struct FreeSupportOptions {
  std::size_t max_iter = 200;
  double tol = 1e-12;
};

struct FreeSupportResult {
  DiscreteMeasure measure;
  double psi = 0.0;
  std::vector<double> psi_history;  // Psi before each update, then the final value
  std::size_t iterations = 0;
  bool converged = false;
};

/// Fixed-point iteration with frozen weights: solve OT from the iterate to each
/// marginal, then move each atom to the sigma-weighted mean of its
/// barycentric-projection images. Psi never increases.
FreeSupportResult free_support_barycenter(const std::vector<DiscreteMeasure>& mus, const StarWeights& w,
                                          const DiscreteMeasure& init, const FreeSupportOptions& options = {});

}  // namespace wnet
