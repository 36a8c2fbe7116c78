#include "sketch_sfa/verify/datagen.hpp"

#include <cmath>
#include <numbers>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::verify {

Eigen::MatrixXd gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
  Eigen::MatrixXd g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
  }
  return g;
}

Eigen::MatrixXd random_orthonormal(std::size_t rows, std::size_t cols, Rng& rng) {
  if (cols > rows) throw InvalidInput("random_orthonormal needs rows >= cols");
  const Eigen::MatrixXd g = gaussian_matrix(rows, cols, rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  // Fix column signs by R's diagonal so the distribution is Haar.
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

exact::Dataset make_blobs(const BlobSpec& spec, Rng& rng, Eigen::MatrixXd* class_means) {
  if (spec.classes < 2 || spec.d < 2 || spec.n < 2 * spec.classes) throw InvalidInput("blob spec too small");
  const auto d = static_cast<Eigen::Index>(spec.d);
  const auto k = static_cast<Eigen::Index>(spec.classes);
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(k, d);
  means(0, 0) = spec.separation;
  if (k > 2) means(1, 1) = 0.7 * spec.separation;
  for (Eigen::Index c = 3; c < k; ++c) means(c - 1, std::min<Eigen::Index>(c - 1, d - 1)) = 0.5 * spec.separation;
  Eigen::VectorXd noise(d);
  for (Eigen::Index j = 0; j < d; ++j) noise(j) = 0.5 + rng.uniform();
  const Eigen::MatrixXd rotation = random_orthonormal(spec.d, spec.d, rng);
  if (class_means) *class_means = means * rotation.transpose();

  exact::Dataset ds;
  ds.mode = exact::DataMode::Classification;
  ds.x.resize(static_cast<Eigen::Index>(spec.n), d);
  ds.labels.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const auto c = static_cast<Eigen::Index>(i % spec.classes);
    Eigen::RowVectorXd row = means.row(c);
    for (Eigen::Index j = 0; j < d; ++j) row(j) += noise(j) * rng.normal();
    ds.x.row(static_cast<Eigen::Index>(i)) = row * rotation.transpose();
    ds.labels[i] = static_cast<long>(c);
  }
  for (std::size_t j = 0; j < spec.d; ++j) ds.columns.push_back("x" + std::to_string(j));
  return ds;
}

exact::Dataset make_wiskott_signal(std::size_t n) {
  if (n < 4) throw InvalidInput("signal needs at least 4 points");
  exact::Dataset ds;
  ds.mode = exact::DataMode::TimeSeries;
  ds.x.resize(static_cast<Eigen::Index>(n), 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    const double c = std::cos(11.0 * t);
    ds.x(static_cast<Eigen::Index>(i), 0) = std::sin(t) + c * c;
    ds.x(static_cast<Eigen::Index>(i), 1) = c;
  }
  ds.columns = {"x1", "x2"};
  return ds;
}

LowRankInstance make_low_rank(std::size_t n, std::size_t m, const Eigen::VectorXd& sigma, double noise, Rng& rng) {
  const auto k = static_cast<std::size_t>(sigma.size());
  if (k == 0 || k > m || k > n) throw InvalidInput("rank must lie in [1, min(n, m)]");
  LowRankInstance out;
  const Eigen::MatrixXd u = random_orthonormal(n, k, rng);
  out.v = random_orthonormal(m, k, rng);
  out.sigma = sigma;
  out.a = u * sigma.asDiagonal() * out.v.transpose();
  if (noise > 0.0) out.a += noise * gaussian_matrix(n, m, rng);
  return out;
}

nlohmann::json describe(const BlobSpec& spec) {
  return {{"generator", "blobs"}, {"n", spec.n}, {"d", spec.d}, {"classes", spec.classes}, {"separation", spec.separation}};
}

}  // namespace sketch_sfa::verify
