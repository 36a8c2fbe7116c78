#include "sketch_sfa/sfa_qi/model.hpp"

#include <cmath>

#include "sketch_sfa/sketch_ops/inner_product.hpp"
#include "sketch_sfa/sketch_ops/sq_matvec.hpp"
#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/io.hpp"

namespace sketch_sfa::qi {

QiInputs make_qi_inputs(const Eigen::MatrixXd& x, const exact::DiffMatrix& xdot) {
  if (x.rows() < 2 || xdot.rows() == 0) throw InvalidInput("pipeline inputs need at least 2 rows and 1 pair");
  if (xdot.xdot.cols() != x.cols()) throw InvalidInput("pipeline inputs: column counts differ");
  QiInputs in;
  in.x_scale = 1.0 / std::sqrt(static_cast<double>(x.rows()));
  in.xdot_scale = 1.0 / std::sqrt(static_cast<double>(xdot.rows()));
  in.x = MatrixSQPair::build(x * in.x_scale, std::make_shared<CostLedger>());
  in.xdot = MatrixSQPair::build(xdot.xdot * in.xdot_scale, std::make_shared<CostLedger>());
  return in;
}

namespace {

constexpr double kCenteringZ = 4.0;

class StepScope {
 public:
  StepScope(std::string name, const QiInputs& in, std::vector<StepRecord>& out)
      : in_(in), out_(out), x0_(in.x.ledger->snapshot()), xd0_(in.xdot.ledger->snapshot()) {
    record_.step = std::move(name);
  }
  nlohmann::json& details() { return record_.details; }
  const std::string& name() const { return record_.step; }
  void finish() {
    record_.x_cost = in_.x.ledger->snapshot() - x0_;
    record_.xdot_cost = in_.xdot.ledger->snapshot() - xd0_;
    out_.push_back(std::move(record_));
  }

 private:
  const QiInputs& in_;
  std::vector<StepRecord>& out_;
  LedgerSnapshot x0_;
  LedgerSnapshot xd0_;
  StepRecord record_;
};

template <typename F>
void run_step(StepScope scope, F&& body) {
  try {
    body(scope.details());
  } catch (const Error& e) {
    rethrow_with_step(e, scope.name());
  }
  scope.finish();
}

nlohmann::json svd_summary(const sketch::ApproxSvd& svd) {
  return {{"rank", svd.rank()},
          {"requested_rows", svd.diagnostics.requested_rows},
          {"sketch_rows", svd.diagnostics.sketch_rows},
          {"distinct_rows", svd.diagnostics.distinct_rows},
          {"clamped", svd.diagnostics.clamped},
          {"isometry_error", svd.diagnostics.isometry_error}};
}

}  // namespace

void QiSfaModel::attach_structures() {
  left_ = std::make_shared<const sketch::LeftFactorSQ>(svd_x_, inputs_.x.a, inputs_.x.at, config_.matvec);
  v_t_ = std::make_shared<const MatrixSQ>(build_matrix(svd_x_.v.transpose()));
  b_inv_half_ = svd_x_.v * svd_x_.sigma.cwiseInverse().asDiagonal() * svd_x_.v.transpose();
  b_inv_half_sq_ = std::make_shared<const MatrixSQ>(build_matrix(b_inv_half_));
}

QiSfaModel build(QiInputs inputs, const PipelineParams& params, Rng& rng, const QiConfig& config) {
  if (!inputs.x.a || !inputs.x.at || !inputs.xdot.a || !inputs.xdot.at) throw InvalidInput("pipeline inputs incomplete");
  if (inputs.x.a->cols() != params.d || params.j == 0 || params.j > params.d) {
    throw InvalidInput("pipeline parameters do not match the data dimension");
  }
  QiSfaModel m;
  m.inputs_ = std::move(inputs);
  m.params_ = params;
  m.config_ = config;
  const auto& in = m.inputs_;
  const std::size_t n = in.x.a->rows();
  const std::size_t d = in.x.a->cols();

  run_step(StepScope("centering", in, m.steps_), [&](nlohmann::json& details) {
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    const std::size_t rows = std::min(config.centering_rows, n);
    for (std::size_t s = 0; s < rows; ++s) {
      const Eigen::VectorXd r = in.x.a->row(rng.below(n));
      sum += r;
      sum_sq += r.cwiseProduct(r);
    }
    double worst = 0.0;
    for (Eigen::Index c = 0; c < sum.size(); ++c) {
      const double rms = std::sqrt(sum_sq(c) / static_cast<double>(rows));
      if (rms > 0.0) worst = std::max(worst, std::abs(sum(c) / static_cast<double>(rows)) / rms);
    }
    // A centered column still shows a sampled ratio of order 1 / sqrt(rows);
    // only a ratio both above tolerance and beyond kCenteringZ standard errors warns.
    const double z = worst * std::sqrt(static_cast<double>(rows));
    details = {{"rows", rows}, {"max_mean_to_rms", worst}, {"z", z}};
    if (worst > config.centering_tolerance && z > kCenteringZ) {
      m.warnings_.push_back("X does not look centered: sampled column mean reaches " + std::to_string(worst) +
                            " of the column RMS");
    }
  });

  run_step(StepScope("step1", in, m.steps_), [&](nlohmann::json& details) {
    sketch::FkvConfig fkv;
    fkv.oversampling = config.fkv_oversampling;
    fkv.max_rows = config.x_sketch_rows;
    fkv.budget = sketch::BudgetPolicy::Clamp;
    m.svd_x_ = sketch::fkv_approx_svd(*in.x.a, params.sigma_threshold, params.eps1, params.eta1, rng, fkv);
    details = svd_summary(m.svd_x_);
  });
  m.attach_structures();

  sketch::MatmulConfig matmul;
  matmul.max_samples = config.max_product_samples;
  matmul.budget = sketch::BudgetPolicy::Clamp;
  run_step(StepScope("step2", in, m.steps_), [&](nlohmann::json& details) {
    const double wanted = sketch::matmul_sample_count(m.left_->frobenius_squared(), m.v_t_->frobenius_squared(),
                                                      params.eps2, params.delta2);
    m.z_hat_.emplace(sketch::approx_matmul(m.left_, m.v_t_, params.eps2, params.delta2, rng, matmul));
    details = {{"requested_samples", wanted}, {"samples", m.z_hat_->samples()}, {"distinct", m.z_hat_->indices().size()}};
  });

  run_step(StepScope("step3", in, m.steps_), [&](nlohmann::json& details) {
    details = {{"frobenius", m.b_inv_half_.norm()}, {"rank", m.svd_x_.rank()}};
  });

  run_step(StepScope("step4", in, m.steps_), [&](nlohmann::json& details) {
    const double wanted = sketch::matmul_sample_count(in.xdot.at->frobenius_squared(),
                                                      m.b_inv_half_sq_->frobenius_squared(), params.eps4, params.delta4);
    m.zdot_hat_.emplace(sketch::approx_matmul(in.xdot.at, m.b_inv_half_sq_, params.eps4, params.delta4, rng, matmul));
    details = {{"requested_samples", wanted}, {"samples", m.zdot_hat_->samples()},
               {"distinct", m.zdot_hat_->indices().size()}};
  });

  run_step(StepScope("step5", in, m.steps_), [&](nlohmann::json& details) {
    sketch::ProductRowsOptions rows_options;
    rows_options.norm_samples = config.norm_samples;
    const auto rows = m.zdot_hat_->rows_sq(in.xdot.a, rng, rows_options);
    sketch::FkvConfig fkv;
    fkv.oversampling = config.fkv_oversampling;
    fkv.max_rows = config.zdot_sketch_rows;
    fkv.budget = sketch::BudgetPolicy::Clamp;
    m.svd_zdot_ = sketch::fkv_approx_svd(*rows, params.gamma_threshold, params.eps5, params.eta5, rng, fkv);
    const std::size_t rank = m.svd_zdot_.rank();
    if (rank < params.j) {
      throw EmptySpectrum("only " + std::to_string(rank) + " directions of Zdot_hat retained, J = " +
                          std::to_string(params.j));
    }
    const auto jj = static_cast<Eigen::Index>(params.j);
    m.w_hat_.resize(static_cast<Eigen::Index>(d), jj);
    m.slow_values_.resize(jj);
    for (Eigen::Index c = 0; c < jj; ++c) {
      const auto src = static_cast<Eigen::Index>(rank) - 1 - c;
      m.w_hat_.col(c) = m.svd_zdot_.v.col(src);
      m.slow_values_(c) = m.svd_zdot_.sigma(src);
    }
    details = svd_summary(m.svd_zdot_);
    details["frobenius_estimate"] = std::sqrt(rows->frobenius_squared());
    details["acceptance_rate"] = rows->stats().acceptance_rate();
  });

  run_step(StepScope("step6", in, m.steps_), [&](nlohmann::json& details) {
    m.w_sq_ = std::make_shared<const MatrixSQ>(build_matrix(m.w_hat_));
    m.w_t_sq_ = std::make_shared<const MatrixSQ>(build_matrix(m.w_hat_.transpose()));
    const Eigen::MatrixXd gram = m.w_hat_.transpose() * m.w_hat_ - Eigen::MatrixXd::Identity(m.w_hat_.cols(), m.w_hat_.cols());
    details = {{"isometry_error", gram.norm()}};
  });
  return m;
}

Eigen::VectorXd QiSfaModel::z_row(std::size_t i) const {
  if (i >= rows()) throw InvalidInput("row index " + std::to_string(i) + " out of range");
  return z_hat_->row(i);
}

Eigen::VectorXd QiSfaModel::output_row(std::size_t i) const { return w_hat_.transpose() * z_row(i); }

Eigen::MatrixXd QiSfaModel::output_matrix() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows()), w_hat_.cols());
  for (std::size_t i = 0; i < rows(); ++i) out.row(static_cast<Eigen::Index>(i)) = output_row(i).transpose();
  return out;
}

std::size_t QiSfaModel::sample_output_row(std::size_t i, Rng& rng) const {
  const Eigen::VectorXd z = z_row(i);
  if (!((w_hat_.transpose() * z).squaredNorm() > 0.0)) {
    throw DegenerateDistribution("output row " + std::to_string(i) + " is zero");
  }
  const sketch::MatVecVector y(w_sq_, z, config_.matvec);
  return y.sample(rng);
}

double QiSfaModel::query_entry(std::size_t i, std::size_t j, QueryMode mode, double eps, double delta, Rng& rng) const {
  if (i >= rows() || j >= components()) {
    throw InvalidInput("entry (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
  }
  const Eigen::VectorXd z = z_row(i);
  if (mode == QueryMode::Exact) return z.dot(w_hat_.col(static_cast<Eigen::Index>(j)));
  const SQHandle x = SQHandle::matrix_row(w_t_sq_, j);
  const SQHandle y = SQHandle::from_values({z.data(), static_cast<std::size_t>(z.size())});
  return sketch::estimate_inner_product(x, y, eps, delta, rng);
}

nlohmann::json QiSfaModel::to_json() const {
  auto steps = nlohmann::json::array();
  for (const auto& s : steps_) {
    steps.push_back({{"step", s.step}, {"x_cost", s.x_cost}, {"xdot_cost", s.xdot_cost}, {"details", s.details}});
  }
  return {{"params", params_},
          {"config", config_},
          {"rows", rows()},
          {"dim", dim()},
          {"svd_x", svd_x_},
          {"z_hat", z_hat_->to_json()},
          {"b_inv_half", matrix_to_json(b_inv_half_)},
          {"zdot_hat", zdot_hat_->to_json()},
          {"svd_zdot", svd_zdot_},
          {"w_hat", matrix_to_json(w_hat_)},
          {"slow_values", vector_to_json(slow_values_)},
          {"steps", steps},
          {"warnings", warnings_}};
}

QiSfaModel QiSfaModel::from_json(const nlohmann::json& j, QiInputs inputs) {
  QiSfaModel m;
  m.inputs_ = std::move(inputs);
  if (j.at("rows").get<std::size_t>() != m.rows() || j.at("dim").get<std::size_t>() != m.dim()) {
    throw InvalidInput("stored model does not match the inputs");
  }
  m.params_ = j.at("params").get<PipelineParams>();
  m.config_ = j.at("config").get<QiConfig>();
  m.svd_x_ = j.at("svd_x").get<sketch::ApproxSvd>();
  m.svd_zdot_ = j.at("svd_zdot").get<sketch::ApproxSvd>();
  m.attach_structures();
  const auto product = [](const nlohmann::json& p, std::shared_ptr<const SQMatrix> at,
                          std::shared_ptr<const SQMatrix> b) {
    return sketch::SuccinctProduct(std::move(at), std::move(b), p.at("samples").get<std::size_t>(),
                                   p.at("indices").get<std::vector<std::size_t>>(), vector_from_json(p.at("weights")));
  };
  m.z_hat_.emplace(product(j.at("z_hat"), m.left_, m.v_t_));
  m.zdot_hat_.emplace(product(j.at("zdot_hat"), m.inputs_.xdot.at, m.b_inv_half_sq_));
  m.w_hat_ = matrix_from_json(j.at("w_hat"));
  m.slow_values_ = vector_from_json(j.at("slow_values"));
  m.w_sq_ = std::make_shared<const MatrixSQ>(build_matrix(m.w_hat_));
  m.w_t_sq_ = std::make_shared<const MatrixSQ>(build_matrix(m.w_hat_.transpose()));
  for (const auto& s : j.at("steps")) {
    m.steps_.push_back({s.at("step").get<std::string>(), s.at("x_cost").get<LedgerSnapshot>(),
                        s.at("xdot_cost").get<LedgerSnapshot>(), s.at("details")});
  }
  m.warnings_ = j.at("warnings").get<std::vector<std::string>>();
  return m;
}

void to_json(nlohmann::json& j, const QiConfig& c) {
  j = {{"x_sketch_rows", c.x_sketch_rows},
       {"zdot_sketch_rows", c.zdot_sketch_rows},
       {"max_product_samples", c.max_product_samples},
       {"norm_samples", c.norm_samples},
       {"centering_rows", c.centering_rows},
       {"centering_tolerance", c.centering_tolerance},
       {"fkv_oversampling", c.fkv_oversampling},
       {"matvec_cap_factor", c.matvec.cap_factor},
       {"matvec_hard_trial_cap", c.matvec.hard_trial_cap}};
}

void from_json(const nlohmann::json& j, QiConfig& c) {
  c.x_sketch_rows = j.at("x_sketch_rows").get<std::size_t>();
  c.zdot_sketch_rows = j.at("zdot_sketch_rows").get<std::size_t>();
  c.max_product_samples = j.at("max_product_samples").get<std::size_t>();
  c.norm_samples = j.at("norm_samples").get<std::size_t>();
  c.centering_rows = j.at("centering_rows").get<std::size_t>();
  c.centering_tolerance = j.at("centering_tolerance").get<double>();
  c.fkv_oversampling = j.at("fkv_oversampling").get<double>();
  c.matvec.cap_factor = j.at("matvec_cap_factor").get<double>();
  c.matvec.hard_trial_cap = j.at("matvec_hard_trial_cap").get<std::uint64_t>();
}

}  // namespace sketch_sfa::qi
