#include "sketch_sfa/sketch_ops/inner_product.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::sketch {

MedianOfMeansPlan median_of_means_plan(double x_norm_sq, double y_norm_sq, double eps, double delta) {
  if (!(eps > 0.0)) throw InvalidInput("inner product: eps must be positive");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("inner product: delta must lie in (0, 1)");
  const double groups = std::ceil(6.0 * std::log(1.0 / delta));
  const double size = std::ceil(9.0 * x_norm_sq * y_norm_sq / (eps * eps));
  if (size > static_cast<double>(std::numeric_limits<std::uint32_t>::max())) {
    throw BudgetExceeded("inner product: group size " + std::to_string(size) + " is too large");
  }
  return {static_cast<std::size_t>(std::max(groups, 1.0)), static_cast<std::size_t>(std::max(size, 1.0))};
}

double estimate_inner_product(const SQHandle& x, const SQHandle& y, double eps, double delta, Rng& rng) {
  if (x.size() != y.size()) throw InvalidInput("inner product: vector lengths differ");
  const double x_norm = x.norm(0.01, rng);
  if (!(x_norm > 0.0)) throw DegenerateDistribution("inner product: x is zero");
  const double y_norm = y.norm(0.1, rng);
  const double x_sq = x_norm * x_norm;
  const auto plan = median_of_means_plan(x_sq, y_norm * y_norm, eps, delta);

  std::vector<double> means(plan.groups);
  for (auto& mean : means) {
    double sum = 0.0;
    for (std::size_t s = 0; s < plan.group_size; ++s) {
      const std::size_t i = x.sample(rng);
      sum += y.query(i) * x_sq / x.query(i);
    }
    mean = sum / static_cast<double>(plan.group_size);
  }
  const auto mid = means.begin() + static_cast<std::ptrdiff_t>(means.size() / 2);
  std::nth_element(means.begin(), mid, means.end());
  if (means.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(means.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace sketch_sfa::sketch
