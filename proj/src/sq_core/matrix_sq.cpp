#include "sketch_sfa/sq_core/matrix_sq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa {

void SQMatrix::read_row(std::size_t i, std::span<double> out) const {
  for (std::size_t j = 0; j < cols(); ++j) out[j] = entry(i, j);
}

void SQMatrix::read_column(std::size_t j, std::span<double> out) const {
  for (std::size_t i = 0; i < rows(); ++i) out[i] = entry(i, j);
}

std::vector<std::pair<std::size_t, std::size_t>> SQMatrix::sample_row_counts(std::size_t draws, Rng& rng) const {
  std::vector<std::size_t> picks(draws);
  for (auto& i : picks) i = sample_row(rng);
  std::sort(picks.begin(), picks.end());
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t s = 0; s < draws;) {
    std::size_t e = s;
    while (e < draws && picks[e] == picks[s]) ++e;
    out.emplace_back(picks[s], e - s);
    s = e;
  }
  return out;
}

Eigen::VectorXd SQMatrix::row(std::size_t i) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(cols()));
  read_row(i, {out.data(), cols()});
  return out;
}

Eigen::MatrixXd SQMatrix::materialize() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows()), static_cast<Eigen::Index>(cols()));
  Eigen::VectorXd buffer(static_cast<Eigen::Index>(cols()));
  for (std::size_t i = 0; i < rows(); ++i) {
    read_row(i, {buffer.data(), cols()});
    out.row(static_cast<Eigen::Index>(i)) = buffer.transpose();
  }
  return out;
}

namespace {

std::vector<double> row_norm_values(std::size_t n, std::size_t d, std::span<const double> values) {
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += values[i * d + j] * values[i * d + j];
    out[i] = std::sqrt(s);
  }
  return out;
}

std::vector<double> validated(std::size_t n, std::size_t d, std::span<const double> row_major) {
  if (n == 0 || d == 0) throw InvalidInput("matrix dimensions must be at least 1x1");
  if (row_major.size() != n * d) {
    throw InvalidInput("expected " + std::to_string(n * d) + " values, got " +
                       std::to_string(row_major.size()));
  }
  for (double v : row_major) {
    if (!std::isfinite(v)) throw InvalidInput("matrix contains a non-finite entry");
  }
  return {row_major.begin(), row_major.end()};
}

}  // namespace

MatrixSQ::MatrixSQ(std::size_t n, std::size_t d, std::span<const double> row_major,
                   std::shared_ptr<CostLedger> ledger)
    : n_(n),
      d_(d),
      row_cap_(detail::tree_capacity(d)),
      row_depth_(detail::tree_depth(row_cap_)),
      values_(validated(n, d, row_major)),
      row_norms_(row_norm_values(n, d, values_)),
      ledger_(std::move(ledger)) {
  row_nodes_.assign(n_ * 2 * row_cap_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    auto nodes = row_nodes(i);
    for (std::size_t j = 0; j < d_; ++j) {
      const double v = values_[i * d_ + j];
      nodes[row_cap_ + j] = v * v;
    }
    detail::aggregate(nodes, row_cap_);
  }
  row_norms_.set_ledger(ledger_);
  if (ledger_) ledger_->read_entries(n_ * d_);
}

void MatrixSQ::check_index(std::size_t i, std::size_t j) const {
  if (i >= n_ || j >= d_) {
    throw IndexError("entry (" + std::to_string(i) + "," + std::to_string(j) + ") out of range for " +
                     std::to_string(n_) + "x" + std::to_string(d_) + " matrix");
  }
}

double MatrixSQ::entry(std::size_t i, std::size_t j) const {
  check_index(i, j);
  if (ledger_) ledger_->read_entries(1);
  return values_[i * d_ + j];
}

void MatrixSQ::read_row(std::size_t i, std::span<double> out) const {
  check_index(i, 0);
  if (out.size() != d_) throw InvalidInput("row buffer has wrong size");
  if (ledger_) ledger_->read_entries(d_);
  for (std::size_t j = 0; j < d_; ++j) out[j] = values_[i * d_ + j];
}

double MatrixSQ::row_squared_norm(std::size_t i) const {
  check_index(i, 0);
  if (ledger_) ledger_->touch_nodes(1);
  return row_nodes(i)[1];
}

std::size_t MatrixSQ::sample_row(Rng& rng) const {
  if (!(row_norms_.squared_norm() > 0.0)) throw DegenerateDistribution("cannot sample rows of an all-zero matrix");
  return row_norms_.sample(rng);
}

std::vector<std::pair<std::size_t, std::size_t>> MatrixSQ::sample_row_counts(std::size_t draws, Rng& rng) const {
  if (!(row_norms_.squared_norm() > 0.0)) throw DegenerateDistribution("cannot sample rows of an all-zero matrix");
  return row_norms_.sample_counts(draws, rng);
}

std::size_t MatrixSQ::sample_in_row(std::size_t i, Rng& rng) const {
  check_index(i, 0);
  const auto nodes = row_nodes(i);
  if (!(nodes[1] > 0.0)) throw DegenerateDistribution("row " + std::to_string(i) + " is all zero");
  const std::size_t j = detail::descend(nodes, row_cap_, rng.uniform());
  if (ledger_) {
    ledger_->touch_nodes(2 * row_depth_ + 1);
    ledger_->draw(1);
  }
  return j;
}

void MatrixSQ::update(std::size_t i, std::size_t j, double value) {
  check_index(i, j);
  if (!std::isfinite(value)) throw InvalidInput("non-finite update value");
  values_[i * d_ + j] = value;
  auto nodes = row_nodes(i);
  const unsigned written = detail::set_leaf(nodes, row_cap_, j, value * value);
  if (ledger_) ledger_->touch_nodes(written);
  row_norms_.update(i, std::sqrt(nodes[1]));
  if (++updates_ >= WeightTree::kReaggregateEvery) reaggregate();
}

void MatrixSQ::reaggregate() {
  for (std::size_t i = 0; i < n_; ++i) {
    auto nodes = row_nodes(i);
    for (std::size_t j = 0; j < d_; ++j) nodes[row_cap_ + j] = values_[i * d_ + j] * values_[i * d_ + j];
    detail::aggregate(nodes, row_cap_);
    row_norms_.update(i, std::sqrt(nodes[1]));
  }
  row_norms_.reaggregate();
  updates_ = 0;
}

double MatrixSQ::row_node(std::size_t i, std::size_t k) const {
  check_index(i, 0);
  return row_nodes(i)[k];
}

MatrixSQ build_matrix(const Eigen::MatrixXd& a, std::shared_ptr<CostLedger> ledger) {
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = a;
  return MatrixSQ(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols()),
                  {rm.data(), static_cast<std::size_t>(rm.size())}, std::move(ledger));
}

MatrixSQPair MatrixSQPair::build(const Eigen::MatrixXd& a, std::shared_ptr<CostLedger> ledger) {
  if (!ledger) ledger = std::make_shared<CostLedger>();
  MatrixSQPair pair;
  pair.a = std::make_shared<const MatrixSQ>(build_matrix(a, ledger));
  pair.at = std::make_shared<const MatrixSQ>(build_matrix(a.transpose(), ledger));
  pair.ledger = std::move(ledger);
  return pair;
}

}  // namespace sketch_sfa
