#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sketch_sfa/sq_core/sq_matrix.hpp"
#include "sketch_sfa/sketch_ops/approx_svd.hpp"
#include "sketch_sfa/sketch_ops/composed.hpp"

namespace sketch_sfa::sketch {

struct MatmulConfig {
  std::size_t max_samples = std::size_t{1} << 24;
  BudgetPolicy budget = BudgetPolicy::Throw;
};

/// t = ceil(|A|_F^2 |B|_F^2 / (delta eps^2)). By Markov's inequality on
/// E|AB - UDV|_F^2 <= |A|_F^2 |B|_F^2 / t this gives error <= eps with
/// probability >= 1 - delta.
double matmul_sample_count(double a_frobenius_sq, double b_frobenius_sq, double eps, double delta);

/// U D V with U = A(., L), V = B(L, .) for a set L of distinct inner indices
/// drawn from D over |A(., l)|^2 and D = diag(count_l / (t p_l)).
/// Holds shared references to both operands; entries of A are read on demand.
class SuccinctProduct {
 public:
  SuccinctProduct(std::shared_ptr<const SQMatrix> at, std::shared_ptr<const SQMatrix> b, std::size_t samples,
                  std::vector<std::size_t> indices, Eigen::VectorXd weights);

  std::size_t rows() const { return at_->cols(); }
  std::size_t cols() const { return b_->cols(); }
  /// Draws t, including repeats.
  std::size_t samples() const noexcept { return samples_; }
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  const Eigen::VectorXd& weights() const noexcept { return weights_; }

  double entry(std::size_t i, std::size_t j) const;
  Eigen::VectorXd row(std::size_t i) const;
  /// Restriction of U to the sampled inner indices, |L| x rows(): row s is A(., L_s)^T.
  Eigen::MatrixXd left_factor() const;
  /// D V, |L| x cols(). Read from B once, at construction.
  const Eigen::MatrixXd& right_factor() const noexcept { return right_; }
  /// Inner-dimension x cols() matrix M with A M = U D V: the rows of D V
  /// scattered to their inner indices, zero elsewhere.
  Eigen::MatrixXd scattered_right_factor() const;
  /// Dense U D V. Reads every entry of the sampled columns of A.
  Eigen::MatrixXd materialize() const;

  /// SQ access to the rows of U D V = A M given row access to A.
  std::shared_ptr<const ProductRowsSQ> rows_sq(std::shared_ptr<const SQMatrix> a_rows, Rng& rng,
                                               ProductRowsOptions options = {}) const;

  nlohmann::json to_json() const;

 private:
  std::shared_ptr<const SQMatrix> at_;
  std::shared_ptr<const SQMatrix> b_;
  std::size_t samples_;
  std::vector<std::size_t> indices_;
  Eigen::VectorXd weights_;
  Eigen::MatrixXd right_;
};

/// A B to absolute Frobenius error eps with probability >= 1 - delta.
/// `at` holds A^T (rows indexed by the inner dimension), `b` holds B.
SuccinctProduct approx_matmul(std::shared_ptr<const SQMatrix> at, std::shared_ptr<const SQMatrix> b, double eps,
                              double delta, Rng& rng, const MatmulConfig& config = {});

/// Same estimator with an explicit number of draws t.
SuccinctProduct approx_matmul_with_samples(std::shared_ptr<const SQMatrix> at, std::shared_ptr<const SQMatrix> b,
                                           std::size_t t, Rng& rng);

}  // namespace sketch_sfa::sketch
