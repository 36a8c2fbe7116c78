#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sketch_sfa/sq_core/cost_ledger.hpp"
#include "sketch_sfa/sq_core/sq_matrix.hpp"
#include "sketch_sfa/sq_core/weight_tree.hpp"

namespace sketch_sfa {

/// Matrix sampling structure: one weight tree per row plus a tree over the
/// row norms Ã(i) = |A(i,.)|^2. Row trees live in a single flat buffer.
class MatrixSQ final : public SQMatrix {
 public:
  /// Row-major n x d values.
  MatrixSQ(std::size_t n, std::size_t d, std::span<const double> row_major,
           std::shared_ptr<CostLedger> ledger = nullptr);

  std::size_t rows() const override { return n_; }
  std::size_t cols() const override { return d_; }
  double entry(std::size_t i, std::size_t j) const override;
  void read_row(std::size_t i, std::span<double> out) const override;
  double row_squared_norm(std::size_t i) const override;
  double frobenius_squared() const override { return row_norms_.squared_norm(); }
  std::size_t sample_row(Rng& rng) const override;
  /// Multinomial splitting down the row-norm tree.
  std::vector<std::pair<std::size_t, std::size_t>> sample_row_counts(std::size_t draws, Rng& rng) const override;
  std::size_t sample_in_row(std::size_t i, Rng& rng) const override;

  void update(std::size_t i, std::size_t j, double value);
  /// Recomputes every internal node from the leaves.
  void reaggregate();

  const WeightTree& row_norm_tree() const noexcept { return row_norms_; }
  /// Node k of row i's tree (1 = root).
  double row_node(std::size_t i, std::size_t k) const;
  std::size_t row_capacity() const noexcept { return row_cap_; }
  std::span<const double> values() const noexcept { return values_; }

  const std::shared_ptr<CostLedger>& ledger() const noexcept { return ledger_; }

 private:
  std::span<const double> row_nodes(std::size_t i) const {
    return {row_nodes_.data() + i * 2 * row_cap_, 2 * row_cap_};
  }
  std::span<double> row_nodes(std::size_t i) {
    return {row_nodes_.data() + i * 2 * row_cap_, 2 * row_cap_};
  }
  void check_index(std::size_t i, std::size_t j) const;

  std::size_t n_;
  std::size_t d_;
  std::size_t row_cap_;
  unsigned row_depth_;
  std::vector<double> values_;
  std::vector<double> row_nodes_;
  std::uint64_t updates_ = 0;
  WeightTree row_norms_;
  std::shared_ptr<CostLedger> ledger_;
};

/// Builds a MatrixSQ over a dense matrix.
MatrixSQ build_matrix(const Eigen::MatrixXd& a, std::shared_ptr<CostLedger> ledger = nullptr);

/// A matrix stored both as A and as its transpose, sharing one ledger.
/// Approximate SVD and matrix-vector sampling need rows of both orientations.
struct MatrixSQPair {
  std::shared_ptr<const MatrixSQ> a;
  std::shared_ptr<const MatrixSQ> at;
  std::shared_ptr<CostLedger> ledger;

  static MatrixSQPair build(const Eigen::MatrixXd& a, std::shared_ptr<CostLedger> ledger = nullptr);
};

}  // namespace sketch_sfa
