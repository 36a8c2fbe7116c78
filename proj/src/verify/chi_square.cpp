#include "sketch_sfa/verify/chi_square.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>

#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/verify/policy.hpp"

namespace sketch_sfa::verify {

ChiSquareResult pearson_chi_square(std::span<const std::uint64_t> counts, std::span<const double> expected) {
  if (counts.size() != expected.size()) throw InvalidInput("chi-square: counts and expected differ in length");
  if (expected.empty()) throw InvalidInput("chi-square: empty support");
  double mass = 0.0;
  for (double p : expected) {
    if (!(p >= 0.0)) throw InvalidInput("chi-square: negative expected probability");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-9) throw InvalidInput("chi-square: expected distribution does not sum to 1");

  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) throw InvalidInput("chi-square: no draws");
  const double m = static_cast<double>(total);

  ChiSquareResult out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out.total_variation += 0.5 * std::abs(static_cast<double>(counts[i]) / m - expected[i]);
    if (expected[i] == 0.0 && counts[i] > 0) {
      out.statistic = std::numeric_limits<double>::infinity();
      out.p_value = 0.0;
    }
  }
  if (out.p_value == 0.0) return out;

  // Pool adjacent bins; a short remainder joins the last full bin.
  std::vector<std::pair<double, double>> bins;  // (observed, expected) counts
  double obs = 0.0;
  double exp = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    obs += static_cast<double>(counts[i]);
    exp += expected[i] * m;
    if (exp >= policy::kMinExpectedCount) {
      bins.emplace_back(obs, exp);
      obs = exp = 0.0;
    }
  }
  if (exp > 0.0 || obs > 0.0) {
    if (bins.empty()) {
      bins.emplace_back(obs, exp);
    } else {
      bins.back().first += obs;
      bins.back().second += exp;
    }
  }
  out.pooled_bins = bins.size();
  for (const auto& [o, e] : bins) out.statistic += (o - e) * (o - e) / e;
  out.degrees_of_freedom = bins.size() - 1;
  if (out.degrees_of_freedom == 0) {
    out.p_value = 1.0;
  } else {
    const boost::math::chi_squared dist(static_cast<double>(out.degrees_of_freedom));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  }
  return out;
}

TrialReport chi_square_test(const std::string& test_id, const std::function<std::size_t(Rng&)>& sampler,
                            std::span<const double> expected, std::size_t samples, Rng& rng) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::uint64_t> counts(expected.size(), 0);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t i = sampler(rng);
    if (i >= counts.size()) throw InvalidInput("chi-square: sample outside the expected support");
    ++counts[i];
  }
  const ChiSquareResult res = pearson_chi_square(counts, expected);
  TrialReport r = make_report(test_id, {rng.key()}, res.p_value, Comparator::Above, policy::kMinPValue);
  r.details = {{"statistic", res.statistic},
               {"degrees_of_freedom", res.degrees_of_freedom},
               {"pooled_bins", res.pooled_bins},
               {"total_variation", res.total_variation},
               {"samples", samples},
               {"support", expected.size()}};
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

TrialReport chi_square_test(const SQHandle& handle, std::span<const double> expected, std::size_t samples, Rng& rng) {
  if (handle.size() != expected.size()) throw InvalidInput("chi-square: handle and expected differ in length");
  return chi_square_test(
      "chi_square", [&handle](Rng& r) { return handle.sample(r); }, expected, samples, rng);
}

}  // namespace sketch_sfa::verify
