#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sketch_sfa/sq_core/matrix_sq.hpp"
#include "sketch_sfa/sq_core/sq_handle.hpp"
#include "sketch_sfa/sketch_ops/sq_matvec.hpp"

namespace sketch_sfa::sketch {

enum class BudgetPolicy { Throw, Clamp };

/// Whether the row sketch is further reduced by sampling columns. Auto
/// samples columns only when that makes the sketch narrower.
enum class ColumnSampling { Auto, Always, Never };

struct FkvConfig {
  /// Oversampling constant c in p = max(min_rows, ceil(c / (eps^2 eta^2)) (|A|_F / sigma)^2).
  double oversampling = 4.0;
  std::size_t min_rows = 16;
  std::size_t max_rows = std::size_t{1} << 22;
  BudgetPolicy budget = BudgetPolicy::Throw;
  ColumnSampling columns = ColumnSampling::Auto;
};

struct FkvDiagnostics {
  double requested_rows = 0.0;  // before clamping; may exceed size_t
  std::size_t sketch_rows = 0;  // row draws actually made
  std::size_t distinct_rows = 0;
  bool clamped = false;
  bool column_sampling = false;
  double isometry_error = 0.0;  // |V^T V - I|_2 of the lifted vectors
};

/// Succinct description of approximate top singular triplets of A (n x m).
///
/// `row_indices` are the distinct sampled rows (ascending); sampled row s of
/// the sketch is row_scale[s] * A(row_indices[s], .), drawn row_counts[s]
/// times. V = S^T coeff, with S the distinct scaled rows. sigma is
/// descending and every entry is >= sigma_threshold * (1 - eta).
struct ApproxSvd {
  std::size_t source_rows = 0;
  std::size_t source_cols = 0;
  double sigma_threshold = 0.0;
  double eps = 0.0;
  double eta = 0.0;
  double frobenius_sq = 0.0;

  std::vector<std::size_t> row_indices;
  std::vector<std::size_t> row_counts;
  std::vector<double> row_scale;
  Eigen::VectorXd column_weights;  // empty unless column sampling was used
  Eigen::MatrixXd coeff;           // distinct rows x rank
  Eigen::VectorXd sigma;           // rank
  Eigen::MatrixXd v;               // source_cols x rank
  Eigen::VectorXd left_norms_sq;   // |S v_l|^2 / sigma_l^2, the squared column norms of U
  FkvDiagnostics diagnostics;

  std::size_t rank() const noexcept { return static_cast<std::size_t>(sigma.size()); }
};

/// Sketch size p before clamping.
double fkv_sketch_rows(double frobenius_sq, double sigma_threshold, double eps, double eta, const FkvConfig& config);

/// Approximate SVD by row sampling from D_Ã, optional column sampling, a small
/// dense eigendecomposition, and lifting through the sampled rows. Only row
/// access to A is used.
ApproxSvd fkv_approx_svd(const SQMatrix& a, double sigma_threshold, double eps, double eta, Rng& rng,
                         const FkvConfig& config = {});

/// SQ access to V(., l).
SQHandle right_vector_handle(const ApproxSvd& svd, std::size_t l);
/// SQ access to the diagonal of Sigma^{-1}.
SQHandle inverse_sigma_handle(const ApproxSvd& svd);

/// U^T (rank x n) where U(., l) = A V(., l) / sigma_l.
///
/// entry(l, i) and read_column(i) read row i of A (m entry reads). Rows are
/// sampled through matrix-vector sampling over A^T, so A^T must be stored.
/// Row norms come from the sketch and are estimates.
class LeftFactorSQ final : public SQMatrix {
 public:
  LeftFactorSQ(const ApproxSvd& svd, std::shared_ptr<const SQMatrix> a, std::shared_ptr<const SQMatrix> at,
               MatVecOptions options = {});

  std::size_t rows() const override { return static_cast<std::size_t>(scaled_v_.cols()); }
  std::size_t cols() const override { return a_->rows(); }
  double entry(std::size_t l, std::size_t i) const override;
  void read_column(std::size_t i, std::span<double> out) const override;
  double row_squared_norm(std::size_t l) const override;
  double frobenius_squared() const override { return norms_->squared_norm(); }
  std::size_t sample_row(Rng& rng) const override { return norms_->sample(rng); }
  std::size_t sample_in_row(std::size_t l, Rng& rng) const override;
  bool exact_norms() const override { return false; }

  /// SQ access to U(., l).
  const SQHandle& column_handle(std::size_t l) const;

 private:
  std::shared_ptr<const SQMatrix> a_;
  Eigen::MatrixXd scaled_v_;  // V Sigma^{-1}
  std::shared_ptr<const WeightTree> norms_;
  std::vector<SQHandle> handles_;
};

void to_json(nlohmann::json& j, const ApproxSvd& svd);
void from_json(const nlohmann::json& j, ApproxSvd& svd);

}  // namespace sketch_sfa::sketch
