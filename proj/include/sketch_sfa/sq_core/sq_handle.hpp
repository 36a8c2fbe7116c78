#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>

#include "sketch_sfa/sq_core/rng.hpp"
#include "sketch_sfa/sq_core/sq_matrix.hpp"
#include "sketch_sfa/sq_core/weight_tree.hpp"

namespace sketch_sfa {

enum class HandleKind { StoredVector, StoredMatrixRow, Composed };

std::string_view to_string(HandleKind kind) noexcept;

/// Declared expected costs, in elementary structure operations, of one
/// sample, one query and one norm estimate.
struct HandleCosts {
  double sample = 0.0;
  double query = 0.0;
  double norm = 0.0;
};

/// Sample-and-query access to a vector x: draw i ~ D_x, read x(i), and obtain
/// |x| (exactly for stored vectors, to multiplicative error nu otherwise).
class SQHandle {
 public:
  class Concept {
   public:
    virtual ~Concept() = default;
    virtual std::size_t size() const = 0;
    virtual double query(std::size_t i) const = 0;
    virtual std::size_t sample(Rng& rng) const = 0;
    virtual double norm(double nu, Rng& rng) const = 0;
    virtual bool exact_norm() const = 0;
    virtual HandleKind kind() const = 0;
    virtual HandleCosts costs() const = 0;
  };

  explicit SQHandle(std::shared_ptr<const Concept> impl);

  static SQHandle stored(std::shared_ptr<const WeightTree> tree);
  static SQHandle from_values(std::span<const double> values);
  static SQHandle matrix_row(std::shared_ptr<const SQMatrix> matrix, std::size_t row);

  std::size_t size() const { return impl_->size(); }
  double query(std::size_t i) const { return impl_->query(i); }
  std::size_t sample(Rng& rng) const { return impl_->sample(rng); }
  /// Norm to multiplicative error `nu` with probability >= 9/10. Exact (and
  /// `nu` ignored) for stored kinds.
  double norm(double nu, Rng& rng) const { return impl_->norm(nu, rng); }
  bool exact_norm() const { return impl_->exact_norm(); }
  HandleKind kind() const { return impl_->kind(); }
  HandleCosts costs() const { return impl_->costs(); }

  const std::shared_ptr<const Concept>& impl() const noexcept { return impl_; }

 private:
  std::shared_ptr<const Concept> impl_;
};

}  // namespace sketch_sfa
