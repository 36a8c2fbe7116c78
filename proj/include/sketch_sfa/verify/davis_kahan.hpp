#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sketch_sfa/verify/trial_report.hpp"

namespace sketch_sfa::verify {

/// One eigenvector of the perturbation check. Eigenpairs are indexed in
/// ascending eigenvalue order.
struct EigenvectorCheck {
  std::size_t index = 0;
  double deviation = 0.0;    // |v_hat - v| after choosing the sign of v_hat
  double denominator = 0.0;  // min(|lambda_hat_{i-1} - lambda_i|, |lambda_hat_{i+1} - lambda_i|)
  double bound = 0.0;        // |A - A_hat|_2 / denominator
  double slack = 0.0;        // round-off allowance of the two eigensolvers
  bool skipped = false;      // denominator vanished; no bound to check
  /// The bound is at least sqrt(2), the largest deviation possible after sign
  /// alignment, or the denominator is within 2 |A - A_hat| of zero so the
  /// perturbation may reorder eigenvalues. Either way the check is not informative.
  bool near_degenerate = false;
  bool violated = false;
  double margin() const { return bound - deviation; }
};

struct DavisKahanResult {
  double perturbation_norm = 0.0;  // spectral norm of A - A_hat
  std::vector<EigenvectorCheck> checks;
  bool violated = false;
  bool flagged = false;  // some index skipped or near-degenerate
};

/// Denominators at or below this multiple of machine epsilon times the
/// spectral scale count as vanishing.
inline constexpr double kVanishingGapFactor = 1e3;

/// Checks |v_hat_i - v_i| <= |A - A_hat| / min(|lambda_hat_{i-1} - lambda_i|,
/// |lambda_hat_{i+1} - lambda_i|) for every i. Inputs must be square, of equal
/// size and symmetric within 1e-10 (InvalidInput otherwise).
DavisKahanResult davis_kahan(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_hat);

/// Report form: observed is the largest deviation / (bound + slack) over
/// indices that were checked, passing iff it is at most 1. Flagged when any index was
/// skipped or near-degenerate.
TrialReport davis_kahan_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_hat);

}  // namespace sketch_sfa::verify
