#pragma once

#include <cstdint>
#include <memory>
#include <mutex>

#include <Eigen/Dense>

#include "sketch_sfa/sq_core/sq_matrix.hpp"
#include "sketch_sfa/sketch_ops/sq_matvec.hpp"

namespace sketch_sfa::sketch {

struct ProductRowsOptions {
  /// Rows drawn from D_Ã to estimate |A M|_F^2.
  std::size_t norm_samples = 2048;
  std::uint64_t hard_trial_cap = std::uint64_t{1} << 22;
};

/// Rows of A M for a row-sampled A (n x m) and a small dense M (m x p).
///
/// Row i is (A_i M); reading it costs m entry reads of A. Rows are sampled by
/// rejection: i ~ D_Ã, accepted with probability |A_i M|^2 / (|A_i|^2 |M|_2^2).
/// The Frobenius norm is an estimate fixed at construction.
class ProductRowsSQ final : public SQMatrix {
 public:
  ProductRowsSQ(std::shared_ptr<const SQMatrix> a, Eigen::MatrixXd m, Rng& rng, ProductRowsOptions options = {});

  std::size_t rows() const override { return a_->rows(); }
  std::size_t cols() const override { return static_cast<std::size_t>(m_.cols()); }
  double entry(std::size_t i, std::size_t j) const override;
  void read_row(std::size_t i, std::span<double> out) const override;
  double row_squared_norm(std::size_t i) const override;
  double frobenius_squared() const override { return frobenius_sq_; }
  std::size_t sample_row(Rng& rng) const override;
  std::size_t sample_in_row(std::size_t i, Rng& rng) const override;
  bool exact_norms() const override { return false; }

  const Eigen::MatrixXd& right() const noexcept { return m_; }
  double right_spectral_norm() const noexcept { return m_norm_; }
  RejectionStats stats() const;

 private:
  Eigen::VectorXd product_row(std::size_t i) const;

  std::shared_ptr<const SQMatrix> a_;
  Eigen::MatrixXd m_;
  ProductRowsOptions options_;
  double m_norm_ = 0.0;
  double frobenius_sq_ = 0.0;
  mutable std::mutex stats_mutex_;
  mutable RejectionStats stats_;
};

}  // namespace sketch_sfa::sketch
