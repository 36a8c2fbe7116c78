#include "sketch_sfa/sketch_ops/approx_matmul.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/io.hpp"

namespace sketch_sfa::sketch {

namespace {

void check_operands(const std::shared_ptr<const SQMatrix>& at, const std::shared_ptr<const SQMatrix>& b) {
  if (!at || !b) throw InvalidInput("approximate product: null operand");
  if (at->rows() != b->rows()) {
    throw InvalidInput("approximate product: inner dimensions " + std::to_string(at->rows()) + " and " +
                       std::to_string(b->rows()) + " differ");
  }
}

}  // namespace

double matmul_sample_count(double a_frobenius_sq, double b_frobenius_sq, double eps, double delta) {
  if (!(eps > 0.0)) throw InvalidInput("approximate product: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("approximate product: delta must lie in (0, 1)");
  return std::max(1.0, std::ceil(a_frobenius_sq * b_frobenius_sq / (delta * eps * eps)));
}

SuccinctProduct::SuccinctProduct(std::shared_ptr<const SQMatrix> at, std::shared_ptr<const SQMatrix> b,
                                 std::size_t samples, std::vector<std::size_t> indices, Eigen::VectorXd weights)
    : at_(std::move(at)), b_(std::move(b)), samples_(samples), indices_(std::move(indices)),
      weights_(std::move(weights)) {
  check_operands(at_, b_);
  if (indices_.size() != static_cast<std::size_t>(weights_.size())) {
    throw InvalidInput("approximate product: index and weight counts differ");
  }
  for (auto l : indices_) {
    if (l >= at_->rows()) throw IndexError("approximate product: inner index out of range");
  }
  right_.resize(static_cast<Eigen::Index>(indices_.size()), static_cast<Eigen::Index>(cols()));
  for (std::size_t s = 0; s < indices_.size(); ++s) {
    right_.row(static_cast<Eigen::Index>(s)) = weights_(static_cast<Eigen::Index>(s)) * b_->row(indices_[s]).transpose();
  }
}

double SuccinctProduct::entry(std::size_t i, std::size_t j) const {
  if (i >= rows() || j >= cols()) throw IndexError("approximate product: entry index out of range");
  double sum = 0.0;
  for (std::size_t s = 0; s < indices_.size(); ++s) {
    sum += at_->entry(indices_[s], i) * right_(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(j));
  }
  return sum;
}

Eigen::VectorXd SuccinctProduct::row(std::size_t i) const {
  if (i >= rows()) throw IndexError("approximate product: row index out of range");
  Eigen::VectorXd left(static_cast<Eigen::Index>(indices_.size()));
  if (2 * indices_.size() >= at_->rows()) {
    // One pass over column i of A^T is cheaper than |L| separate entries.
    Eigen::VectorXd column(static_cast<Eigen::Index>(at_->rows()));
    at_->read_column(i, {column.data(), at_->rows()});
    for (std::size_t s = 0; s < indices_.size(); ++s) left(static_cast<Eigen::Index>(s)) = column(static_cast<Eigen::Index>(indices_[s]));
  } else {
    for (std::size_t s = 0; s < indices_.size(); ++s) left(static_cast<Eigen::Index>(s)) = at_->entry(indices_[s], i);
  }
  return right_.transpose() * left;
}

Eigen::MatrixXd SuccinctProduct::left_factor() const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(indices_.size()), static_cast<Eigen::Index>(rows()));
  for (std::size_t s = 0; s < indices_.size(); ++s) out.row(static_cast<Eigen::Index>(s)) = at_->row(indices_[s]).transpose();
  return out;
}

Eigen::MatrixXd SuccinctProduct::scattered_right_factor() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(at_->rows()), right_.cols());
  for (std::size_t s = 0; s < indices_.size(); ++s) out.row(static_cast<Eigen::Index>(indices_[s])) = right_.row(static_cast<Eigen::Index>(s));
  return out;
}

Eigen::MatrixXd SuccinctProduct::materialize() const { return left_factor().transpose() * right_; }

std::shared_ptr<const ProductRowsSQ> SuccinctProduct::rows_sq(std::shared_ptr<const SQMatrix> a_rows, Rng& rng,
                                                              ProductRowsOptions options) const {
  if (!a_rows || a_rows->rows() != rows() || a_rows->cols() != at_->rows()) {
    throw InvalidInput("approximate product: row orientation does not match A");
  }
  return std::make_shared<const ProductRowsSQ>(std::move(a_rows), scattered_right_factor(), rng, options);
}

nlohmann::json SuccinctProduct::to_json() const {
  return {{"rows", rows()},
          {"cols", cols()},
          {"samples", samples_},
          {"indices", indices_},
          {"weights", vector_to_json(weights_)}};
}

SuccinctProduct approx_matmul_with_samples(std::shared_ptr<const SQMatrix> at, std::shared_ptr<const SQMatrix> b,
                                           std::size_t t, Rng& rng) {
  check_operands(at, b);
  if (t == 0) throw InvalidInput("approximate product: sample count must be positive");
  const double frob2 = at->frobenius_squared();
  if (!(frob2 > 0.0)) throw DegenerateDistribution("approximate product: A is zero");
  if (!(b->frobenius_squared() > 0.0)) throw DegenerateDistribution("approximate product: B is zero");

  std::vector<std::size_t> indices;
  std::vector<double> weights;
  for (const auto& [l, count] : at->sample_row_counts(t, rng)) {
    const double p = at->row_squared_norm(l) / frob2;
    indices.push_back(l);
    weights.push_back(static_cast<double>(count) / (static_cast<double>(t) * p));
  }
  return {std::move(at), std::move(b), t, std::move(indices),
          Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()))};
}

SuccinctProduct approx_matmul(std::shared_ptr<const SQMatrix> at, std::shared_ptr<const SQMatrix> b, double eps,
                              double delta, Rng& rng, const MatmulConfig& config) {
  check_operands(at, b);
  const double wanted = matmul_sample_count(at->frobenius_squared(), b->frobenius_squared(), eps, delta);
  std::size_t t = 0;
  if (wanted > static_cast<double>(config.max_samples)) {
    if (config.budget == BudgetPolicy::Throw) {
      throw BudgetExceeded("approximate product: needs " + std::to_string(wanted) + " samples, budget is " +
                           std::to_string(config.max_samples));
    }
    t = config.max_samples;
  } else {
    t = static_cast<std::size_t>(wanted);
  }
  return approx_matmul_with_samples(std::move(at), std::move(b), t, rng);
}

}  // namespace sketch_sfa::sketch
