#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sketch_sfa/sq_core/rng.hpp"
#include "sketch_sfa/sq_core/sq_handle.hpp"
#include "sketch_sfa/verify/trial_report.hpp"

namespace sketch_sfa::verify {

struct ChiSquareResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t degrees_of_freedom = 0;
  std::size_t pooled_bins = 0;
  /// Total variation distance between empirical and expected frequencies.
  double total_variation = 0.0;
};

/// Pearson goodness of fit. Adjacent bins are pooled until every pooled bin
/// expects at least policy::kMinExpectedCount draws. A draw in a bin of zero
/// expected mass gives an infinite statistic and p = 0. `expected` must sum
/// to 1 within 1e-9 and match `counts` in length (InvalidInput otherwise).
ChiSquareResult pearson_chi_square(std::span<const std::uint64_t> counts, std::span<const double> expected);

/// Draws `samples` indices and tests them against `expected`.
TrialReport chi_square_test(const std::string& test_id, const std::function<std::size_t(Rng&)>& sampler,
                            std::span<const double> expected, std::size_t samples, Rng& rng);

TrialReport chi_square_test(const SQHandle& handle, std::span<const double> expected, std::size_t samples, Rng& rng);

}  // namespace sketch_sfa::verify
