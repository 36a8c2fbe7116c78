#include "sketch_sfa/sfa_exact/exact_sfa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/io.hpp"

namespace sketch_sfa::exact {

namespace {

Eigen::VectorXd squared_gaps(const Eigen::VectorXd& s) {
  Eigen::VectorXd gaps(std::max<Eigen::Index>(s.size() - 1, 0));
  for (Eigen::Index i = 0; i + 1 < s.size(); ++i) gaps(i) = s(i) * s(i) - s(i + 1) * s(i + 1);
  return gaps;
}

// First differing coordinate decides between tied eigenvalues; larger first.
bool lexicographically_greater(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) != b(i)) return a(i) > b(i);
  }
  return false;
}

}  // namespace

SfaResult exact_sfa(const Eigen::MatrixXd& x, const DiffMatrix& xdot, std::size_t j, const ExactSfaOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2 || d < 1) throw InvalidInput("exact SFA needs at least 2 rows and 1 column");
  if (j < 1 || j > static_cast<std::size_t>(d)) {
    throw InvalidInput("J = " + std::to_string(j) + " must lie in [1, " + std::to_string(d) + "]");
  }
  if (xdot.xdot.cols() != d || xdot.rows() == 0 || static_cast<std::size_t>(xdot.xdot.rows()) != xdot.rows()) {
    throw InvalidInput("difference matrix does not match the data");
  }

  SfaResult out;
  const Eigen::MatrixXd xs = x / std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd xdot_s = xdot.xdot / std::sqrt(static_cast<double>(xdot.rows()));
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(xs, Eigen::ComputeThinV);
  out.x_singular = svd.singularValues();
  out.x_gaps = squared_gaps(out.x_singular);
  out.theta = out.x_singular.size() == d ? out.x_singular(d - 1) : 0.0;
  out.x_frobenius = xs.norm();
  out.xdot_frobenius = xdot_s.norm();
  out.b = xs.transpose() * xs;

  const double cutoff = options.rank_tolerance * out.x_singular(0);
  Eigen::Index rank = 0;
  while (rank < out.x_singular.size() && out.x_singular(rank) > cutoff) ++rank;
  out.rank = static_cast<std::size_t>(rank);
  if (rank < d && !options.pseudo_inverse) {
    throw RankDeficient("X is rank deficient: smallest singular value " + std::to_string(out.theta), out.theta);
  }
  if (rank == 0) throw RankDeficient("X is zero", 0.0);
  if (static_cast<std::size_t>(rank) < j) throw InvalidInput("J exceeds the numerical rank of X");

  const Eigen::MatrixXd v_r = svd.matrixV().leftCols(rank);
  const Eigen::VectorXd s_inv = out.x_singular.head(rank).cwiseInverse();
  out.b_inv_half = v_r * s_inv.asDiagonal() * v_r.transpose();
  const Eigen::MatrixXd basis = v_r * s_inv.asDiagonal();  // d x r, whitening into range(X)

  const Eigen::MatrixXd dot_cov = xdot_s.transpose() * xdot_s;
  out.xdot_spectral = std::sqrt(std::max(
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dot_cov, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff(), 0.0));
  const Eigen::MatrixXd g = basis.transpose() * dot_cov * basis;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (g + g.transpose()));
  if (eig.info() != Eigen::Success) throw InvalidInput("eigendecomposition of the whitened derivative failed");

  // Whitened directions in the ambient d-space, sign-normalized.
  Eigen::MatrixXd dirs = v_r * eig.eigenvectors();
  Eigen::MatrixXd coeffs = basis * eig.eigenvectors();
  for (Eigen::Index c = 0; c < rank; ++c) {
    Eigen::Index arg = 0;
    dirs.col(c).cwiseAbs().maxCoeff(&arg);
    if (dirs(arg, c) < 0.0) {
      dirs.col(c) = -dirs.col(c);
      coeffs.col(c) = -coeffs.col(c);
    }
  }
  Eigen::VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(rank));
  std::iota(order.begin(), order.end(), 0);
  const double scale = std::max(1.0, lambda.maxCoeff());
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (std::abs(lambda(a) - lambda(b)) <= 1e-10 * scale) {
      return lexicographically_greater(dirs.col(a), dirs.col(b));
    }
    return lambda(a) < lambda(b);
  });

  const auto jj = static_cast<Eigen::Index>(j);
  out.whitened_weights.resize(d, jj);
  out.weights.resize(d, jj);
  for (Eigen::Index c = 0; c < jj; ++c) {
    out.whitened_weights.col(c) = dirs.col(order[static_cast<std::size_t>(c)]);
    out.weights.col(c) = coeffs.col(order[static_cast<std::size_t>(c)]);
  }
  out.zdot_singular.resize(rank);
  for (Eigen::Index c = 0; c < rank; ++c) {
    out.zdot_singular(c) = std::sqrt(lambda(order[static_cast<std::size_t>(rank - 1 - c)]));
  }
  out.zdot_gaps = squared_gaps(out.zdot_singular);
  out.gamma = out.zdot_singular(rank - 1);

  out.y = x * out.weights;
  out.deltas.resize(jj);
  for (Eigen::Index c = 0; c < jj; ++c) out.deltas(c) = delta_value(out.y.col(c), xdot);
  return out;
}

double delta_value(const Eigen::VectorXd& y, const DiffMatrix& context) {
  if (context.pairs.empty()) throw InvalidInput("delta_value needs at least one pair");
  double sum = 0.0;
  for (const auto& [s, t] : context.pairs) {
    if (s >= static_cast<std::size_t>(y.size()) || t >= static_cast<std::size_t>(y.size())) {
      throw IndexError("pair index out of range for the signal");
    }
    const double diff = y(static_cast<Eigen::Index>(s)) - y(static_cast<Eigen::Index>(t));
    sum += diff * diff;
  }
  return sum / static_cast<double>(context.pairs.size());
}

nlohmann::json to_json(const SfaResult& r) {
  return {{"weights", matrix_to_json(r.weights)},
          {"whitened_weights", matrix_to_json(r.whitened_weights)},
          {"x_singular", vector_to_json(r.x_singular)},
          {"zdot_singular", vector_to_json(r.zdot_singular)},
          {"x_gaps", vector_to_json(r.x_gaps)},
          {"zdot_gaps", vector_to_json(r.zdot_gaps)},
          {"deltas", vector_to_json(r.deltas)},
          {"theta", r.theta},
          {"gamma", r.gamma},
          {"x_frobenius", r.x_frobenius},
          {"xdot_frobenius", r.xdot_frobenius},
          {"xdot_spectral", r.xdot_spectral},
          {"rank", r.rank}};
}

}  // namespace sketch_sfa::exact
