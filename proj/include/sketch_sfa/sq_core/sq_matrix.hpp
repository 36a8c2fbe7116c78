#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sketch_sfa/sq_core/rng.hpp"

namespace sketch_sfa {

/// Sample-and-query access to a matrix A: entry queries, row norms, the
/// Frobenius norm, sampling a row index from D_Ã and sampling a column index
/// within a row from D_{A(i,.)}.
///
/// Stored matrices (MatrixSQ) answer norms exactly. Composed matrices may
/// return estimates; `exact_norms()` tells which.
class SQMatrix {
 public:
  virtual ~SQMatrix() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;
  virtual double entry(std::size_t i, std::size_t j) const = 0;
  /// Row i into `out` (size cols()).
  virtual void read_row(std::size_t i, std::span<double> out) const;
  /// Column j into `out` (size rows()). Only meant for short columns.
  virtual void read_column(std::size_t j, std::span<double> out) const;
  virtual double row_squared_norm(std::size_t i) const = 0;
  virtual double frobenius_squared() const = 0;
  virtual std::size_t sample_row(Rng& rng) const = 0;
  virtual std::size_t sample_in_row(std::size_t i, Rng& rng) const = 0;
  /// `draws` independent row samples from D_Ã, aggregated as (row, count)
  /// pairs in ascending row order. The default draws one at a time.
  virtual std::vector<std::pair<std::size_t, std::size_t>> sample_row_counts(std::size_t draws, Rng& rng) const;
  virtual bool exact_norms() const { return true; }

  Eigen::VectorXd row(std::size_t i) const;
  /// Dense copy. Reads every entry; for small operands and verification only.
  Eigen::MatrixXd materialize() const;
};

}  // namespace sketch_sfa
