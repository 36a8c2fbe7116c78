#include "sketch_sfa/verify/alignment.hpp"

#include <cmath>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::verify {

Alignment align_columns(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& estimate) {
  if (reference.rows() != estimate.rows() || reference.cols() != estimate.cols()) {
    throw InvalidInput("alignment: shapes differ");
  }
  const Eigen::Index k = reference.cols();
  const Eigen::MatrixXd overlap = reference.transpose() * estimate;
  std::vector<bool> ref_used(static_cast<std::size_t>(k), false);
  std::vector<bool> est_used(static_cast<std::size_t>(k), false);
  Alignment out;
  out.permutation.assign(static_cast<std::size_t>(k), 0);
  out.signs.assign(static_cast<std::size_t>(k), 1.0);
  for (Eigen::Index round = 0; round < k; ++round) {
    double best = -1.0;
    Eigen::Index bi = 0;
    Eigen::Index bj = 0;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (ref_used[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (est_used[static_cast<std::size_t>(j)]) continue;
        if (std::abs(overlap(i, j)) > best) {
          best = std::abs(overlap(i, j));
          bi = i;
          bj = j;
        }
      }
    }
    ref_used[static_cast<std::size_t>(bi)] = true;
    est_used[static_cast<std::size_t>(bj)] = true;
    out.permutation[static_cast<std::size_t>(bi)] = static_cast<std::size_t>(bj);
    out.signs[static_cast<std::size_t>(bi)] = overlap(bi, bj) < 0.0 ? -1.0 : 1.0;
  }
  out.aligned.resize(estimate.rows(), k);
  for (Eigen::Index i = 0; i < k; ++i) {
    out.aligned.col(i) = out.signs[static_cast<std::size_t>(i)] *
                         estimate.col(static_cast<Eigen::Index>(out.permutation[static_cast<std::size_t>(i)]));
  }
  return out;
}

double aligned_distance(const Eigen::MatrixXd& reference, const Eigen::MatrixXd& estimate) {
  return (reference - align_columns(reference, estimate).aligned).norm();
}

}  // namespace sketch_sfa::verify
