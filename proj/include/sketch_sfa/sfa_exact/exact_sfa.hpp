#pragma once

#include <cstddef>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sketch_sfa/sfa_exact/dataset.hpp"

namespace sketch_sfa::exact {

struct ExactSfaOptions {
  /// Singular values of X at or below rank_tolerance * sigma_max count as zero.
  double rank_tolerance = 1e-10;
  /// Whiten with the pseudo-inverse instead of raising RankDeficient.
  bool pseudo_inverse = false;
};

/// Dense SFA solution.
///
/// Scaling: with X_s = X / sqrt(n) and Xdot_s = Xdot / sqrt(C) (C pairs),
/// B = X_s^T X_s is the covariance, Z_s = X_s B^{-1/2} has orthonormal
/// columns, and Zdot = Xdot_s B^{-1/2}. The slow features Y = X W then have
/// unit variance, and delta(y_j) = sigma_j(Zdot)^2.
struct SfaResult {
  Eigen::MatrixXd weights;           // d x J, Y = X weights, weights^T B weights = I
  Eigen::MatrixXd whitened_weights;  // d x J, slowest right singular vectors of Zdot
  Eigen::MatrixXd y;                 // n x J
  Eigen::MatrixXd b;                 // d x d
  Eigen::MatrixXd b_inv_half;        // d x d

  Eigen::VectorXd x_singular;      // of X_s, descending
  Eigen::VectorXd zdot_singular;   // of Zdot, descending
  Eigen::VectorXd x_gaps;          // sigma_i^2 - sigma_{i+1}^2 of X_s
  Eigen::VectorXd zdot_gaps;       // same for Zdot
  Eigen::VectorXd deltas;          // delta(y_j), ascending
  double theta = 0.0;              // smallest singular value of X_s
  double gamma = 0.0;              // smallest singular value of Zdot
  double x_frobenius = 0.0;        // |X_s|_F
  double xdot_frobenius = 0.0;     // |Xdot_s|_F
  double xdot_spectral = 0.0;      // |Xdot_s|_2
  std::size_t rank = 0;            // numerical rank of X

  std::size_t components() const { return static_cast<std::size_t>(weights.cols()); }
};

/// Slowest J features of X under the pair set of `xdot`.
SfaResult exact_sfa(const Eigen::MatrixXd& x, const DiffMatrix& xdot, std::size_t j, const ExactSfaOptions& options = {});

/// Mean over the pairs of (y(s) - y(t))^2.
double delta_value(const Eigen::VectorXd& y, const DiffMatrix& context);

nlohmann::json to_json(const SfaResult& result);

}  // namespace sketch_sfa::exact
