#include "sketch_sfa/sfa_qi/spectra.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::qi {

namespace {

// Unbiased estimate of A^T A from `rows` length-squared row draws.
Eigen::MatrixXd sketched_gram(const SQMatrix& a, Rng& rng, std::size_t rows) {
  const double frob2 = a.frobenius_squared();
  if (!(frob2 > 0.0)) throw DegenerateDistribution("spectral estimate: matrix is zero");
  const auto d = static_cast<Eigen::Index>(a.cols());
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t s = 0; s < rows; ++s) {
    const Eigen::VectorXd r = a.row(a.sample_row(rng));
    gram.noalias() += (r * r.transpose()) / r.squaredNorm();
  }
  return gram * (frob2 / static_cast<double>(rows));
}

}  // namespace

SpectralSummary estimate_spectra(const SQMatrix& x, const SQMatrix& xdot, Rng& rng, std::size_t rows) {
  if (x.cols() != xdot.cols()) throw InvalidInput("spectral estimate: column counts differ");
  if (rows == 0) throw InvalidInput("spectral estimate: rows must be positive");
  const Eigen::MatrixXd b = sketched_gram(x, rng, rows);
  const Eigen::MatrixXd c = sketched_gram(xdot, rng, rows);

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(b);
  const Eigen::VectorXd lb = eb.eigenvalues().cwiseMax(0.0);  // ascending
  if (!(lb(0) > 0.0)) throw RankDeficient("spectral estimate: sketched covariance is singular", 0.0);
  const Eigen::MatrixXd inv_half = eb.eigenvectors() * lb.cwiseSqrt().cwiseInverse().asDiagonal() *
                                   eb.eigenvectors().transpose();
  const Eigen::MatrixXd zc = inv_half * c * inv_half;
  const Eigen::VectorXd lz =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (zc + zc.transpose()), Eigen::EigenvaluesOnly)
          .eigenvalues()
          .cwiseMax(0.0);
  const Eigen::VectorXd lc =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(c, Eigen::EigenvaluesOnly).eigenvalues().cwiseMax(0.0);

  SpectralSummary s;
  s.x_frobenius = std::sqrt(x.frobenius_squared());
  s.xdot_frobenius = std::sqrt(xdot.frobenius_squared());
  s.x_spectral = std::sqrt(lb(lb.size() - 1));
  s.xdot_spectral = std::sqrt(lc(lc.size() - 1));
  s.theta = std::sqrt(lb(0));
  s.gamma = std::sqrt(lz(0));
  double gap = lb(lb.size() - 1);
  for (Eigen::Index i = 0; i + 1 < lb.size(); ++i) gap = std::min(gap, lb(i + 1) - lb(i));
  s.gap = gap / x.frobenius_squared();
  s.rank = x.cols();
  return s;
}

}  // namespace sketch_sfa::qi
