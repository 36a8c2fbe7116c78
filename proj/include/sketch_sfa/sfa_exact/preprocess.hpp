#pragma once

#include <cstddef>

#include "sketch_sfa/sfa_exact/dataset.hpp"
#include "sketch_sfa/sq_core/rng.hpp"

namespace sketch_sfa::exact {

/// Centers every column and scales it to unit population variance. Constant
/// columns are dropped and reported in `warnings`. Requires n >= 2.
Dataset normalize(const Dataset& ds);

/// Appends all degree-2 monomials: [x_1..x_d, x_1 x_1, x_1 x_2, .., x_d x_d].
/// Throws BudgetExceeded when d + d(d+1)/2 exceeds `max_dim`.
Dataset quadratic_expand(const Dataset& ds, std::size_t max_dim = 4096);

/// Classification: per class, all pairs if there are at most
/// `max_pairs_per_class`, otherwise that many distinct pairs drawn without
/// replacement and sorted. Time-series: consecutive differences.
DiffMatrix pairwise_differentiate(const Dataset& ds, std::size_t max_pairs_per_class, Rng& rng);

/// Rebuilds the difference rows of `pairs` from `x`.
Eigen::MatrixXd difference_rows(const Eigen::MatrixXd& x, const DiffMatrix& pairs);

}  // namespace sketch_sfa::exact
