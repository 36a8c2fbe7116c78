#include "sketch_sfa/sq_core/sq_handle.hpp"

#include <cmath>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa {

std::string_view to_string(HandleKind kind) noexcept {
  switch (kind) {
    case HandleKind::StoredVector: return "stored-vector";
    case HandleKind::StoredMatrixRow: return "stored-matrix-row-view";
    case HandleKind::Composed: return "composed";
  }
  return "unknown";
}

namespace {

class StoredVector final : public SQHandle::Concept {
 public:
  explicit StoredVector(std::shared_ptr<const WeightTree> tree) : tree_(std::move(tree)) {}

  std::size_t size() const override { return tree_->size(); }
  double query(std::size_t i) const override { return tree_->query(i); }
  std::size_t sample(Rng& rng) const override { return tree_->sample(rng); }
  double norm(double, Rng&) const override { return tree_->norm(); }
  bool exact_norm() const override { return true; }
  HandleKind kind() const override { return HandleKind::StoredVector; }
  HandleCosts costs() const override {
    const double depth = static_cast<double>(tree_->depth());
    return {2.0 * depth + 1.0, 1.0, 1.0};
  }

 private:
  std::shared_ptr<const WeightTree> tree_;
};

class MatrixRow final : public SQHandle::Concept {
 public:
  MatrixRow(std::shared_ptr<const SQMatrix> matrix, std::size_t row) : matrix_(std::move(matrix)), row_(row) {
    if (row_ >= matrix_->rows()) throw IndexError("row view index out of range");
  }

  std::size_t size() const override { return matrix_->cols(); }
  double query(std::size_t i) const override { return matrix_->entry(row_, i); }
  std::size_t sample(Rng& rng) const override { return matrix_->sample_in_row(row_, rng); }
  double norm(double, Rng&) const override { return std::sqrt(matrix_->row_squared_norm(row_)); }
  bool exact_norm() const override { return matrix_->exact_norms(); }
  HandleKind kind() const override { return HandleKind::StoredMatrixRow; }
  HandleCosts costs() const override {
    const double depth = std::ceil(std::log2(static_cast<double>(matrix_->cols())));
    return {2.0 * depth + 1.0, 1.0, 1.0};
  }

 private:
  std::shared_ptr<const SQMatrix> matrix_;
  std::size_t row_;
};

}  // namespace

SQHandle::SQHandle(std::shared_ptr<const Concept> impl) : impl_(std::move(impl)) {
  if (!impl_) throw InvalidInput("SQHandle requires an implementation");
}

SQHandle SQHandle::stored(std::shared_ptr<const WeightTree> tree) {
  if (!tree) throw InvalidInput("null weight tree");
  return SQHandle(std::make_shared<StoredVector>(std::move(tree)));
}

SQHandle SQHandle::from_values(std::span<const double> values) {
  return stored(std::make_shared<const WeightTree>(values));
}

SQHandle SQHandle::matrix_row(std::shared_ptr<const SQMatrix> matrix, std::size_t row) {
  if (!matrix) throw InvalidInput("null matrix");
  return SQHandle(std::make_shared<MatrixRow>(std::move(matrix), row));
}

}  // namespace sketch_sfa
