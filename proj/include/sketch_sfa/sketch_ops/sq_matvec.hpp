#pragma once

#include <cstdint>
#include <memory>
#include <mutex>

#include <Eigen/Dense>

#include "sketch_sfa/sq_core/sq_handle.hpp"
#include "sketch_sfa/sq_core/sq_matrix.hpp"
#include "sketch_sfa/sq_core/weight_tree.hpp"

namespace sketch_sfa::sketch {

struct MatVecOptions {
  /// A sample call gives up after cap_factor * k * C_hat trials, C_hat being
  /// the running estimate of the overhead ratio C(V, w).
  double cap_factor = 64.0;
  /// Absolute per-call trial limit; also covers the case C_hat = infinity.
  std::uint64_t hard_trial_cap = std::uint64_t{1} << 24;
};

struct RejectionStats {
  std::uint64_t calls = 0;
  std::uint64_t trials = 0;
  std::uint64_t accepted = 0;
  double acceptance_mass = 0.0;  // sum of acceptance probabilities over all trials

  double acceptance_rate() const { return trials ? static_cast<double>(accepted) / static_cast<double>(trials) : 0.0; }
};

/// SQ access to x = V w, given SQ access to the columns of V (i.e. the rows
/// of V^T, each of length n) and a dense k-vector w.
///
/// query(i) is exact and costs k entry reads. sample() proposes j with
/// probability ~ w_j^2 |V(.,j)|^2, then i ~ D_{V(.,j)}, and accepts with
/// probability (Vw)_i^2 / (k sum_j (w_j V(i,j))^2); the expected number of
/// trials is k * C(V, w) with C(V, w) = sum_j w_j^2 |V(.,j)|^2 / |Vw|^2.
class MatVecVector final : public SQHandle::Concept {
 public:
  MatVecVector(std::shared_ptr<const SQMatrix> vt, Eigen::VectorXd w, MatVecOptions options = {});

  std::size_t size() const override { return vt_->cols(); }
  double query(std::size_t i) const override;
  std::size_t sample(Rng& rng) const override;
  double norm(double nu, Rng& rng) const override;
  bool exact_norm() const override { return false; }
  HandleKind kind() const override { return HandleKind::Composed; }
  HandleCosts costs() const override;

  /// sum_j w_j^2 |V(.,j)|^2, the numerator of C(V, w).
  double proposal_mass() const noexcept { return proposal_mass_; }
  /// Running estimate of C(V, w) from all trials so far (infinity before any
  /// acceptance mass has been observed).
  double overhead_estimate() const;
  RejectionStats stats() const;
  const Eigen::VectorXd& weights() const noexcept { return w_; }

 private:
  // One proposal; returns the index and its acceptance probability.
  std::pair<std::size_t, double> propose(Rng& rng) const;
  void record(std::uint64_t trials, double mass, bool accepted) const;

  std::shared_ptr<const SQMatrix> vt_;
  Eigen::VectorXd w_;
  MatVecOptions options_;
  std::shared_ptr<const WeightTree> proposal_;
  double proposal_mass_ = 0.0;
  std::size_t k_ = 0;

  mutable std::mutex stats_mutex_;
  mutable RejectionStats stats_;
};

/// SQ access to V w. `vt` holds V^T (k x n); `w` has length k.
SQHandle sq_matvec(std::shared_ptr<const SQMatrix> vt, Eigen::VectorXd w, MatVecOptions options = {});

}  // namespace sketch_sfa::sketch
