#include "wnet/uniqueness.hpp"

#include <cmath>
#include <limits>

#include "wnet/error.hpp"

namespace wnet {

std::vector<double> cost_gradient(std::size_t i, const PointList& xs, const StarWeights& w) {
  if (xs.size() != w.size()) throw Error(ErrorKind::InvalidArgument, "point count differs from weight count");
  if (i >= xs.size()) throw Error(ErrorKind::InvalidArgument, "marginal index out of range");
  const double total = w.total();
  std::vector<double> g(xs[i].size(), 0.0);
  for (std::size_t a = 0; a < g.size(); ++a) {
    g[a] = 2.0 * (w[i] - w[i] * w[i] / total) * xs[i][a];
    for (std::size_t j = 0; j < xs.size(); ++j) {
      if (j != i) g[a] -= 2.0 * w[i] * w[j] / total * xs[j][a];
    }
  }
  return g;
}

Eigen::MatrixXd cost_hessian_block(std::size_t i, std::size_t j, const StarWeights& w, std::size_t n) {
  if (i >= w.size() || j >= w.size()) throw Error(ErrorKind::InvalidArgument, "marginal index out of range");
  const double total = w.total();
  const double coef = i == j ? 2.0 * (w[i] - w[i] * w[i] / total) : -2.0 * w[i] * w[j] / total;
  return coef * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
}

Eigen::MatrixXd cost_hessian(const StarWeights& w, std::size_t n) {
  const auto l = static_cast<Eigen::Index>(w.size()), nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd h(l * nn, l * nn);
  for (Eigen::Index i = 0; i < l; ++i) {
    for (Eigen::Index j = 0; j < l; ++j) {
      h.block(i * nn, j * nn, nn, nn) = cost_hessian_block(static_cast<std::size_t>(i), static_cast<std::size_t>(j), w, n);
    }
  }
  return h;
}

PassConditions check_pass_conditions(const StarWeights& w, std::size_t n) {
  const Eigen::MatrixXd block = cost_hessian_block(0, w.size() - 1, w, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(block);
  PassConditions out;
  out.min_singular_value = svd.singularValues().minCoeff();
  // Scale-aware cutoff relative to the whole Hessian.
  const double scale = std::max(1.0, cost_hessian(w, n).cwiseAbs().maxCoeff());
  out.twisted = out.nondegenerate = out.min_singular_value > 1e-14 * scale;
  return out;
}

TTensorReport assemble_T(const BlockMatrix& blocks, std::size_t n) {
  const std::size_t l = blocks.size();
  if (l < 3) throw Error(ErrorKind::InvalidArgument, "T needs at least three marginals");
  const auto nn = static_cast<Eigen::Index>(n);
  const std::size_t last = l - 1, middle = l - 2;

  TTensorReport r;
  r.l = l;
  r.n = n;
  r.hessian_blocks = blocks;
  const Eigen::MatrixXd& d1l = blocks[0][last];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(d1l);
  const double smin = svd.singularValues().minCoeff();
  r.twisted = r.nondegenerate = smin > 1e-14 * std::max(1.0, d1l.cwiseAbs().maxCoeff());
  const Eigen::MatrixXd d1l_inv = d1l.inverse();

  const auto dim = static_cast<Eigen::Index>(middle) * nn;
  r.S_raw = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 1; i <= middle; ++i) {
    for (std::size_t j = 1; j <= middle; ++j) {
      Eigen::MatrixXd block = blocks[i][last] * d1l_inv * blocks[0][j];
      if (i != j) block -= blocks[i][j];
      r.S_raw.block(static_cast<Eigen::Index>(i - 1) * nn, static_cast<Eigen::Index>(j - 1) * nn, nn, nn) = block;
    }
  }
  r.asymmetry = (r.S_raw - r.S_raw.transpose()).cwiseAbs().maxCoeff();
  r.S = 0.5 * (r.S_raw + r.S_raw.transpose());
  r.H = Eigen::MatrixXd::Zero(dim, dim);
  r.T = r.S + r.H;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.T, Eigen::EigenvaluesOnly);
  r.eigenvalues = eig.eigenvalues();
  r.max_eigenvalue = r.eigenvalues.maxCoeff();
  r.T_negative = r.max_eigenvalue < -1e-12;
  r.closed_form_error = std::numeric_limits<double>::quiet_NaN();
  return r;
}

TTensorReport compute_T_star(const StarWeights& w, std::size_t n) {
  const std::size_t l = w.size();
  if (l < 3) throw Error(ErrorKind::InvalidArgument, "T needs at least three marginals");
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  BlockMatrix blocks(l, std::vector<Eigen::MatrixXd>(l));
  for (std::size_t i = 0; i < l; ++i) {
    for (std::size_t j = 0; j < l; ++j) blocks[i][j] = cost_hessian_block(i, j, w, n);
  }
  TTensorReport r = assemble_T(blocks, n);
  r.sigma.assign(w.sigmas().begin(), w.sigmas().end());

  const auto nn = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd closed = Eigen::MatrixXd::Zero(r.T.rows(), r.T.cols());
  for (std::size_t i = 1; i + 1 < l; ++i) {
    const auto off = static_cast<Eigen::Index>(i - 1) * nn;
    closed.block(off, off, nn, nn).diagonal().setConstant(-2.0 * w[i] * w[i] / w.total());
  }
  r.closed_form_error = (r.T - closed).cwiseAbs().maxCoeff();
  return r;
}

Labeling parse_labeling(const std::string& name) {
  if (name == "standard") return Labeling::Standard;
  if (name == "swapped") return Labeling::Swapped;
  throw Error(ErrorKind::InvalidArgument, "labeling must be 'standard' or 'swapped', got '" + name + "'");
}

std::string to_string(Labeling labeling) { return labeling == Labeling::Standard ? "standard" : "swapped"; }

Eigen::Matrix4d hgraph_reduced_form(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw Error(ErrorKind::InvalidArgument, "edge lengths must be positive");
  // Vertices x1..x4 = 0..3, y1 = 4, y2 = 5.
  struct WeightedEdge {
    int p, q;
    double w;
  };
  const WeightedEdge edges[] = {{0, 4, 1 / a}, {1, 4, 1 / a}, {4, 5, 1 / b}, {2, 5, 1 / a}, {3, 5, 1 / a}};
  Eigen::Matrix<double, 6, 6> lap = Eigen::Matrix<double, 6, 6>::Zero();
  for (const auto& e : edges) {
    lap(e.p, e.p) += e.w;
    lap(e.q, e.q) += e.w;
    lap(e.p, e.q) -= e.w;
    lap(e.q, e.p) -= e.w;
  }
  const Eigen::Matrix2d lyy = lap.block<2, 2>(4, 4);
  if (std::abs(lyy.determinant()) <= 1e-14 * lyy.cwiseAbs().maxCoeff() * lyy.cwiseAbs().maxCoeff()) {
    throw Error(ErrorKind::SingularInnerSolve, "interior system is singular");
  }
  return lap.block<4, 4>(0, 0) - lap.block<4, 2>(0, 4) * lyy.inverse() * lap.block<2, 4>(4, 0);
}

std::vector<std::size_t> hgraph_order(Labeling labeling) {
  if (labeling == Labeling::Standard) return {0, 1, 2, 3};
  return {0, 3, 2, 1};
}

TTensorReport compute_T_hgraph(const HGraphSpec& spec) {
  if (spec.n == 0) throw Error(ErrorKind::InvalidArgument, "dimension must be positive");
  const Eigen::Matrix4d form = hgraph_reduced_form(spec.a, spec.b);
  const auto order = hgraph_order(spec.labeling);
  const auto nn = static_cast<Eigen::Index>(spec.n);
  BlockMatrix blocks(4, std::vector<Eigen::MatrixXd>(4));
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      const double coef = 2.0 * form(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(order[j]));
      blocks[i][j] = coef * Eigen::MatrixXd::Identity(nn, nn);
    }
  }
  return assemble_T(blocks, spec.n);
}

std::pair<double, double> default_bracket(Labeling labeling) {
  // max eig T is not monotone in a/b over wide ranges; these brackets hug the crossing.
  return labeling == Labeling::Standard ? std::pair{1.0, 2.0} : std::pair{3.0, 6.0};
}

ThresholdResult hgraph_threshold(Labeling labeling, double b, std::pair<double, double> bracket, double tol) {
  auto f = [&](double ratio) { return compute_T_hgraph({ratio * b, b, labeling, 1}).max_eigenvalue; };
  double lo = bracket.first, hi = bracket.second;
  if (!(lo < hi) || !(f(lo) > 0.0) || !(f(hi) < 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "bracket does not straddle a sign change of max eig T");
  }
  ThresholdResult r;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
    ++r.iterations;
  }
  r.ratio = 0.5 * (lo + hi);
  return r;
}

}  // namespace wnet
