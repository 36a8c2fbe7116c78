#include "sketch_sfa/sketch_ops/approx_svd.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/io.hpp"

namespace sketch_sfa::sketch {

namespace {

void check_unit_interval(double v, const char* name) {
  if (!(v > 0.0 && v < 1.0)) throw InvalidInput(std::string("approximate SVD: ") + name + " must lie in (0, 1)");
}

// Flips each column so that its largest-magnitude coordinate is positive.
void normalize_signs(Eigen::MatrixXd& v, Eigen::MatrixXd& coeff) {
  for (Eigen::Index l = 0; l < v.cols(); ++l) {
    Eigen::Index arg = 0;
    v.col(l).cwiseAbs().maxCoeff(&arg);
    if (v(arg, l) < 0.0) {
      v.col(l) = -v.col(l);
      coeff.col(l) = -coeff.col(l);
    }
  }
}

}  // namespace

double fkv_sketch_rows(double frobenius_sq, double sigma_threshold, double eps, double eta, const FkvConfig& config) {
  const double base = std::ceil(config.oversampling / (eps * eps * eta * eta));
  const double ratio = frobenius_sq / (sigma_threshold * sigma_threshold);
  return std::max(static_cast<double>(config.min_rows), std::ceil(base * ratio));
}

ApproxSvd fkv_approx_svd(const SQMatrix& a, double sigma_threshold, double eps, double eta, Rng& rng,
                         const FkvConfig& config) {
  if (!(sigma_threshold > 0.0) || !std::isfinite(sigma_threshold)) {
    throw InvalidInput("approximate SVD: sigma threshold must be positive");
  }
  check_unit_interval(eps, "eps");
  check_unit_interval(eta, "eta");
  if (!(config.oversampling > 0.0) || config.max_rows == 0) throw InvalidInput("approximate SVD: bad configuration");

  const double frob2 = a.frobenius_squared();
  if (!(frob2 > 0.0)) throw DegenerateDistribution("approximate SVD: matrix is zero");
  const double cutoff = sigma_threshold * (1.0 - eta);
  if (cutoff * cutoff > frob2) {
    throw EmptySpectrum("approximate SVD: threshold " + std::to_string(sigma_threshold) +
                        " exceeds every singular value");
  }

  ApproxSvd out;
  out.source_rows = a.rows();
  out.source_cols = a.cols();
  out.sigma_threshold = sigma_threshold;
  out.eps = eps;
  out.eta = eta;
  out.frobenius_sq = frob2;

  auto& diag = out.diagnostics;
  diag.requested_rows = fkv_sketch_rows(frob2, sigma_threshold, eps, eta, config);
  if (diag.requested_rows > static_cast<double>(config.max_rows)) {
    if (config.budget == BudgetPolicy::Throw) {
      throw BudgetExceeded("approximate SVD: sketch needs " + std::to_string(diag.requested_rows) +
                           " rows, budget is " + std::to_string(config.max_rows));
    }
    diag.clamped = true;
    diag.sketch_rows = config.max_rows;
  } else {
    diag.sketch_rows = static_cast<std::size_t>(diag.requested_rows);
  }
  const std::size_t p = diag.sketch_rows;

  // Row draws; repeated draws of one row yield identical sketch rows, so they
  // are kept once with a multiplicity.
  for (const auto& [row, count] : a.sample_row_counts(p, rng)) {
    out.row_indices.push_back(row);
    out.row_counts.push_back(count);
  }
  const auto distinct = static_cast<Eigen::Index>(out.row_indices.size());
  const auto m = static_cast<Eigen::Index>(a.cols());
  diag.distinct_rows = out.row_indices.size();

  Eigen::MatrixXd s_rows(distinct, m);
  Eigen::VectorXd counts(distinct);
  out.row_scale.resize(out.row_indices.size());
  Eigen::VectorXd buffer(m);
  for (Eigen::Index r = 0; r < distinct; ++r) {
    a.read_row(out.row_indices[static_cast<std::size_t>(r)], {buffer.data(), static_cast<std::size_t>(m)});
    const double norm2 = buffer.squaredNorm();
    const double scale = std::sqrt(frob2 / (static_cast<double>(p) * norm2));
    out.row_scale[static_cast<std::size_t>(r)] = scale;
    s_rows.row(r) = scale * buffer.transpose();
    counts(r) = static_cast<double>(out.row_counts[static_cast<std::size_t>(r)]);
  }

  // H = S^T S over all p sketch rows.
  const Eigen::MatrixXd weighted = counts.cwiseSqrt().asDiagonal() * s_rows;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m, m);
  h.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose());
  h = h.selfadjointView<Eigen::Lower>();

  diag.column_sampling = config.columns == ColumnSampling::Always ||
                         (config.columns == ColumnSampling::Auto && static_cast<std::size_t>(m) > p);
  Eigen::VectorXd col_root = Eigen::VectorXd::Ones(m);
  if (diag.column_sampling) {
    // Column j ~ |S(., j)|^2 / |S|_F^2: pick a sketch row uniformly, then j ~ D_{S(s, .)}.
    std::vector<double> root_counts(out.row_counts.begin(), out.row_counts.end());
    for (auto& c : root_counts) c = std::sqrt(c);
    const WeightTree pick(root_counts);
    Eigen::VectorXd hits = Eigen::VectorXd::Zero(m);
    for (std::size_t s = 0; s < p; ++s) {
      const std::size_t r = pick.sample(rng);
      hits(static_cast<Eigen::Index>(a.sample_in_row(out.row_indices[r], rng))) += 1.0;
    }
    const Eigen::VectorXd col_sq = h.diagonal();
    const double total = col_sq.sum();
    out.column_weights = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < m; ++j) {
      if (hits(j) > 0.0) out.column_weights(j) = hits(j) * total / (static_cast<double>(p) * col_sq(j));
    }
    col_root = out.column_weights.cwiseSqrt();
  }

  const Eigen::MatrixXd g = col_root.asDiagonal() * h * col_root.asDiagonal();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  if (eig.info() != Eigen::Success) throw EmptySpectrum("approximate SVD: sketch eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending

  std::vector<Eigen::Index> kept;
  for (Eigen::Index k = m - 1; k >= 0; --k) {
    const double s = std::sqrt(std::max(lambda(k), 0.0));
    if (s >= cutoff) kept.push_back(k);
  }
  if (kept.empty()) {
    throw EmptySpectrum("approximate SVD: no singular value above " + std::to_string(cutoff));
  }
  const auto rank = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd vm(m, rank);
  out.sigma.resize(rank);
  for (Eigen::Index l = 0; l < rank; ++l) {
    vm.col(l) = eig.eigenvectors().col(kept[static_cast<std::size_t>(l)]);
    out.sigma(l) = std::sqrt(lambda(kept[static_cast<std::size_t>(l)]));
  }
  const Eigen::VectorXd inv_sq = out.sigma.array().square().inverse().matrix();

  // V = S^T S D^{1/2} Vm Sigma^{-2}; with no column sampling this is Vm.
  const Eigen::MatrixXd projected = col_root.asDiagonal() * vm * inv_sq.asDiagonal();
  out.coeff = counts.asDiagonal() * (s_rows * projected);
  out.v = diag.column_sampling ? Eigen::MatrixXd(h * projected) : vm;
  normalize_signs(out.v, out.coeff);

  out.left_norms_sq.resize(rank);
  for (Eigen::Index l = 0; l < rank; ++l) {
    out.left_norms_sq(l) = out.v.col(l).dot(h * out.v.col(l)) * inv_sq(l);
  }
  const Eigen::MatrixXd gram = out.v.transpose() * out.v - Eigen::MatrixXd::Identity(rank, rank);
  diag.isometry_error = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram, Eigen::EigenvaluesOnly)
                            .eigenvalues()
                            .cwiseAbs()
                            .maxCoeff();
  return out;
}

SQHandle right_vector_handle(const ApproxSvd& svd, std::size_t l) {
  if (l >= svd.rank()) throw IndexError("right singular vector index out of range");
  const Eigen::VectorXd column = svd.v.col(static_cast<Eigen::Index>(l));
  return SQHandle::from_values({column.data(), static_cast<std::size_t>(column.size())});
}

SQHandle inverse_sigma_handle(const ApproxSvd& svd) {
  const Eigen::VectorXd inv = svd.sigma.cwiseInverse();
  return SQHandle::from_values({inv.data(), static_cast<std::size_t>(inv.size())});
}

LeftFactorSQ::LeftFactorSQ(const ApproxSvd& svd, std::shared_ptr<const SQMatrix> a,
                           std::shared_ptr<const SQMatrix> at, MatVecOptions options)
    : a_(std::move(a)) {
  if (!a_ || !at) throw InvalidInput("left factor: null matrix");
  if (a_->rows() != at->cols() || a_->cols() != at->rows() || a_->cols() != svd.source_cols) {
    throw InvalidInput("left factor: orientations do not match the decomposition");
  }
  scaled_v_ = svd.v * svd.sigma.cwiseInverse().asDiagonal();
  std::vector<double> roots(svd.rank());
  for (std::size_t l = 0; l < roots.size(); ++l) roots[l] = std::sqrt(svd.left_norms_sq(static_cast<Eigen::Index>(l)));
  norms_ = std::make_shared<const WeightTree>(roots);
  handles_.reserve(svd.rank());
  for (Eigen::Index l = 0; l < scaled_v_.cols(); ++l) handles_.push_back(sq_matvec(at, scaled_v_.col(l), options));
}

double LeftFactorSQ::entry(std::size_t l, std::size_t i) const {
  if (l >= rows()) throw IndexError("left factor: row index out of range");
  return a_->row(i).dot(scaled_v_.col(static_cast<Eigen::Index>(l)));
}

void LeftFactorSQ::read_column(std::size_t i, std::span<double> out) const {
  const Eigen::VectorXd values = scaled_v_.transpose() * a_->row(i);
  for (std::size_t l = 0; l < rows(); ++l) out[l] = values(static_cast<Eigen::Index>(l));
}

double LeftFactorSQ::row_squared_norm(std::size_t l) const {
  const double v = norms_->query(l);
  return v * v;
}

std::size_t LeftFactorSQ::sample_in_row(std::size_t l, Rng& rng) const { return column_handle(l).sample(rng); }

const SQHandle& LeftFactorSQ::column_handle(std::size_t l) const {
  if (l >= handles_.size()) throw IndexError("left factor: column index out of range");
  return handles_[l];
}

void to_json(nlohmann::json& j, const ApproxSvd& svd) {
  const auto& d = svd.diagnostics;
  j = {{"source_rows", svd.source_rows},
       {"source_cols", svd.source_cols},
       {"sigma_threshold", svd.sigma_threshold},
       {"eps", svd.eps},
       {"eta", svd.eta},
       {"frobenius_sq", svd.frobenius_sq},
       {"row_indices", svd.row_indices},
       {"row_counts", svd.row_counts},
       {"row_scale", svd.row_scale},
       {"column_weights", vector_to_json(svd.column_weights)},
       {"coeff", matrix_to_json(svd.coeff)},
       {"sigma", vector_to_json(svd.sigma)},
       {"v", matrix_to_json(svd.v)},
       {"left_norms_sq", vector_to_json(svd.left_norms_sq)},
       {"diagnostics",
        {{"requested_rows", d.requested_rows},
         {"sketch_rows", d.sketch_rows},
         {"distinct_rows", d.distinct_rows},
         {"clamped", d.clamped},
         {"column_sampling", d.column_sampling},
         {"isometry_error", d.isometry_error}}}};
}

void from_json(const nlohmann::json& j, ApproxSvd& svd) {
  svd.source_rows = j.at("source_rows").get<std::size_t>();
  svd.source_cols = j.at("source_cols").get<std::size_t>();
  svd.sigma_threshold = j.at("sigma_threshold").get<double>();
  svd.eps = j.at("eps").get<double>();
  svd.eta = j.at("eta").get<double>();
  svd.frobenius_sq = j.at("frobenius_sq").get<double>();
  svd.row_indices = j.at("row_indices").get<std::vector<std::size_t>>();
  svd.row_counts = j.at("row_counts").get<std::vector<std::size_t>>();
  svd.row_scale = j.at("row_scale").get<std::vector<double>>();
  svd.column_weights = vector_from_json(j.at("column_weights"));
  svd.coeff = matrix_from_json(j.at("coeff"));
  svd.sigma = vector_from_json(j.at("sigma"));
  svd.v = matrix_from_json(j.at("v"));
  svd.left_norms_sq = vector_from_json(j.at("left_norms_sq"));
  const auto& d = j.at("diagnostics");
  svd.diagnostics.requested_rows = d.at("requested_rows").get<double>();
  svd.diagnostics.sketch_rows = d.at("sketch_rows").get<std::size_t>();
  svd.diagnostics.distinct_rows = d.at("distinct_rows").get<std::size_t>();
  svd.diagnostics.clamped = d.at("clamped").get<bool>();
  svd.diagnostics.column_sampling = d.at("column_sampling").get<bool>();
  svd.diagnostics.isometry_error = d.at("isometry_error").get<double>();
  if (static_cast<std::size_t>(svd.v.cols()) != svd.rank() || svd.row_indices.size() != svd.row_counts.size()) {
    throw InvalidInput("approximate SVD JSON is inconsistent");
  }
}

}  // namespace sketch_sfa::sketch
