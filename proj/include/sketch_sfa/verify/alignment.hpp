#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace sketch_sfa::verify {

struct Alignment {
  /// estimate column assigned to each reference column
  std::vector<std::size_t> permutation;
  std::vector<double> signs;
  /// estimate columns reordered and sign-flipped to match the reference
  Eigen::MatrixXd aligned;
};

/// Greedy matching by largest |<reference_i, estimate_j>| among unmatched
/// pairs (ties go to the lowest indices), then sign fixing so matched inner
/// products are non-negative. Both inputs must have the same shape.
Alignment align_columns(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& estimate);

/// |reference - aligned estimate|_F.
double aligned_distance(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& estimate);

}  // namespace sketch_sfa::verify
