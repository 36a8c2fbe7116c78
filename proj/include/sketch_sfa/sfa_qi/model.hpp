#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sketch_sfa/sfa_exact/dataset.hpp"
#include "sketch_sfa/sfa_qi/params.hpp"
#include "sketch_sfa/sketch_ops/approx_matmul.hpp"
#include "sketch_sfa/sketch_ops/approx_svd.hpp"
#include "sketch_sfa/sq_core/cost_ledger.hpp"
#include "sketch_sfa/sq_core/matrix_sq.hpp"

namespace sketch_sfa::qi {

/// Sketch budgets. The parameter table asks for sketch sizes far beyond any
/// memory; each step samples min(theoretical, budget) and records both.
struct QiConfig {
  std::size_t x_sketch_rows = 512;
  std::size_t zdot_sketch_rows = std::size_t{1} << 14;
  std::size_t max_product_samples = std::size_t{1} << 22;
  std::size_t norm_samples = 2048;
  std::size_t centering_rows = 64;
  /// Warn when a sampled column mean exceeds this fraction of the column RMS.
  double centering_tolerance = 0.25;
  double fkv_oversampling = 4.0;
  sketch::MatVecOptions matvec;
};

/// Scaled inputs X_s = X / sqrt(n) and Xdot_s = Xdot / sqrt(C), stored in
/// both orientations. X and Xdot have separate ledgers so X-entry reads can
/// be audited on their own.
struct QiInputs {
  MatrixSQPair x;
  MatrixSQPair xdot;
  double x_scale = 1.0;     // 1 / sqrt(n)
  double xdot_scale = 1.0;  // 1 / sqrt(C)
};

QiInputs make_qi_inputs(const Eigen::MatrixXd& x, const exact::DiffMatrix& xdot);

struct StepRecord {
  std::string step;
  LedgerSnapshot x_cost;
  LedgerSnapshot xdot_cost;
  nlohmann::json details = nlohmann::json::object();
};

enum class QueryMode { Exact, Estimated };

/// Output of the sampled SFA pipeline. Immutable after build; sampling and
/// queries may run concurrently with independent rng streams.
///
/// Scale: Y_hat = Z_hat W_hat approximates Z_s W = Y / sqrt(n), with Y the
/// unit-variance slow features of the dense solution.
class QiSfaModel {
 public:
  std::size_t rows() const { return inputs_.x.a->rows(); }
  std::size_t dim() const { return inputs_.x.a->cols(); }
  std::size_t components() const { return static_cast<std::size_t>(w_hat_.cols()); }

  const PipelineParams& params() const noexcept { return params_; }
  const QiConfig& config() const noexcept { return config_; }
  const sketch::ApproxSvd& svd_x() const noexcept { return svd_x_; }
  const sketch::ApproxSvd& svd_zdot() const noexcept { return svd_zdot_; }
  const sketch::SuccinctProduct& z_hat() const { return *z_hat_; }
  const Eigen::MatrixXd& b_inv_half() const noexcept { return b_inv_half_; }
  const sketch::SuccinctProduct& zdot_hat() const { return *zdot_hat_; }
  /// d x J, slowest direction first.
  const Eigen::MatrixXd& w_hat() const noexcept { return w_hat_; }
  /// Singular values of the sketched Zdot belonging to the columns of w_hat.
  const Eigen::VectorXd& slow_values() const noexcept { return slow_values_; }
  const std::vector<StepRecord>& steps() const noexcept { return steps_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }
  const QiInputs& inputs() const noexcept { return inputs_; }

  /// Z_hat(i, .); reads row i of X.
  Eigen::VectorXd z_row(std::size_t i) const;
  /// Y_hat(i, .).
  Eigen::VectorXd output_row(std::size_t i) const;
  /// Dense Y_hat. Reads all of X; for verification.
  Eigen::MatrixXd output_matrix() const;

  /// Column index drawn from D_{Y_hat(i, .)} via matrix-vector sampling over W_hat.
  std::size_t sample_output_row(std::size_t i, Rng& rng) const;
  /// Y_hat(i, j). Exact mode sums d products; estimated mode uses the
  /// inner-product estimator with x = W_hat(., j) and y = Z_hat(i, .).
  double query_entry(std::size_t i, std::size_t j, QueryMode mode, double eps, double delta, Rng& rng) const;

  nlohmann::json to_json() const;
  /// Rebuilds a model from `to_json` output over the same inputs.
  static QiSfaModel from_json(const nlohmann::json& j, QiInputs inputs);

 private:
  friend QiSfaModel build(QiInputs inputs, const PipelineParams& params, Rng& rng, const QiConfig& config);
  void attach_structures();

  QiInputs inputs_;
  PipelineParams params_;
  QiConfig config_;
  sketch::ApproxSvd svd_x_;
  sketch::ApproxSvd svd_zdot_;
  std::shared_ptr<const sketch::LeftFactorSQ> left_;
  std::shared_ptr<const MatrixSQ> v_t_;
  std::optional<sketch::SuccinctProduct> z_hat_;
  Eigen::MatrixXd b_inv_half_;
  std::shared_ptr<const MatrixSQ> b_inv_half_sq_;
  std::optional<sketch::SuccinctProduct> zdot_hat_;
  Eigen::MatrixXd w_hat_;
  Eigen::VectorXd slow_values_;
  std::shared_ptr<const MatrixSQ> w_sq_;
  std::shared_ptr<const MatrixSQ> w_t_sq_;
  std::vector<StepRecord> steps_;
  std::vector<std::string> warnings_;
};

/// Runs the six build steps: approximate SVD of X, Z_hat = U_hat V_hat^T,
/// B_hat^{-1/2} = V_hat Sigma_hat^{-1} V_hat^T, Zdot_hat = Xdot B_hat^{-1/2},
/// approximate SVD of Zdot_hat keeping its J smallest retained directions,
/// and storage of W_hat. Errors carry the step they came from.
QiSfaModel build(QiInputs inputs, const PipelineParams& params, Rng& rng, const QiConfig& config = {});

void to_json(nlohmann::json& j, const QiConfig& c);
void from_json(const nlohmann::json& j, QiConfig& c);

}  // namespace sketch_sfa::qi
