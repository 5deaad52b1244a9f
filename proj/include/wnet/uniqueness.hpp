#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wnet/multimarginal.hpp"

namespace wnet {

/// D_{x_i} c for the star cost, as a length-n covector (i is 0-based).
std::vector<double> cost_gradient(std::size_t i, const PointList& xs, const StarWeights& w);

/// D_{x_i x_j} c: 2 (sigma_i - sigma_i^2 / S) I on the diagonal, -2 sigma_i sigma_j / S I off it.
Eigen::MatrixXd cost_hessian_block(std::size_t i, std::size_t j, const StarWeights& w, std::size_t n);

/// The full (l n) x (l n) Hessian.
Eigen::MatrixXd cost_hessian(const StarWeights& w, std::size_t n);

struct PassConditions {
  bool twisted = false;
  bool nondegenerate = false;
  double min_singular_value = 0.0;  // of the (first, last) block
};

/// For a quadratic cost both conditions reduce to invertibility of the
/// (first, last) Hessian block; checked numerically.
PassConditions check_pass_conditions(const StarWeights& w, std::size_t n);

using BlockMatrix = std::vector<std::vector<Eigen::MatrixXd>>;

struct TTensorReport {
  std::size_t l = 0;
  std::size_t n = 0;
  std::vector<double> sigma;  // empty for the H-graph
  BlockMatrix hessian_blocks;
  Eigen::MatrixXd S_raw;  // before symmetrization
  Eigen::MatrixXd S;
  Eigen::MatrixXd H;
  Eigen::MatrixXd T;
  Eigen::VectorXd eigenvalues;  // ascending
  double max_eigenvalue = 0.0;
  double asymmetry = 0.0;  // max |S_raw - S_raw^T|
  /// Star only: max deviation of T from -2 sigma_i^2 / S on the diagonal; NaN otherwise.
  double closed_form_error = 0.0;
  bool twisted = false;
  bool nondegenerate = false;
  bool T_negative = false;
};

/// Assembles S over the middle indices 1..l-2 from constant Hessian blocks:
///   S_ij = -D_ij (i != j) + D_{i,last} D_{first,last}^{-1} D_{first,j}.
/// H vanishes for quadratic costs. S is reported symmetrized (T is a quadratic
/// form); the raw assembly and its asymmetry are kept alongside.
TTensorReport assemble_T(const BlockMatrix& blocks, std::size_t n);

/// Requires l >= 3.
TTensorReport compute_T_star(const StarWeights& w, std::size_t n);

enum class Labeling { Standard, Swapped };
Labeling parse_labeling(const std::string& name);
std::string to_string(Labeling labeling);

/// Two interior vertices y1 (joined to mu1, mu2) and y2 (joined to mu3, mu4),
/// outer edges of length a and the bridge of length b.
struct HGraphSpec {
  double a = 1.0;
  double b = 1.0;
  Labeling labeling = Labeling::Standard;
  std::size_t n = 1;
};

/// Reduced cost 4x4 form: Schur complement of the edge Laplacian (weights
/// 1/a, 1/a, 1/b, 1/a, 1/a) with the interior vertices eliminated.
Eigen::Matrix4d hgraph_reduced_form(double a, double b);

/// Marginal order fed to the assembly: first, middle, middle, last.
std::vector<std::size_t> hgraph_order(Labeling labeling);

TTensorReport compute_T_hgraph(const HGraphSpec& spec);

struct ThresholdResult {
  double ratio = 0.0;
  std::size_t iterations = 0;
};

/// Default bisection bracket on a/b containing the sign change of max eig T.
std::pair<double, double> default_bracket(Labeling labeling);

/// Bisects the critical a/b where max eig T crosses zero, to tol. Throws
/// InvalidArgument if the bracket does not straddle a sign change.
ThresholdResult hgraph_threshold(Labeling labeling, double b, std::pair<double, double> bracket,
                                 double tol = 1e-6);

}  // namespace wnet
