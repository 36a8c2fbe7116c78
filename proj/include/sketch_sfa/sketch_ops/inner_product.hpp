#pragma once

#include <cstddef>

#include "sketch_sfa/sq_core/rng.hpp"
#include "sketch_sfa/sq_core/sq_handle.hpp"

namespace sketch_sfa::sketch {

struct MedianOfMeansPlan {
  std::size_t groups = 0;      // ceil(6 ln(1/delta))
  std::size_t group_size = 0;  // ceil(9 |x|^2 |y|^2 / eps^2)
};

MedianOfMeansPlan median_of_means_plan(double x_norm_sq, double y_norm_sq, double eps, double delta);

/// Estimates <x, y> to additive error eps with probability >= 1 - delta.
/// Each sample draws i ~ D_x and contributes y(i) |x|^2 / x(i); the result
/// is the median of group means. Only query access to y is used beyond its
/// norm, which sets the group size. Norms of composed handles are estimated
/// to relative error 0.01 (x) and 0.1 (y).
double estimate_inner_product(const SQHandle& x, const SQHandle& y, double eps, double delta, Rng& rng);

}  // namespace sketch_sfa::sketch
