#pragma once

#include <cstddef>

// Finite-sample pass policies for every statistical check. Kept in one place
// so acceptance thresholds can be audited without reading test code.
namespace sketch_sfa::verify::policy {

/// Distribution tests pass iff the p-value exceeds this.
inline constexpr double kMinPValue = 0.001;
/// Bins with a smaller expected count are pooled before a chi-square test.
inline constexpr double kMinExpectedCount = 5.0;

/// Seeded majority for "with probability 9/10" claims.
inline constexpr std::size_t kSeeds = 10;
inline constexpr std::size_t kSeedMajority = 8;

/// Empirical failure rate may exceed the nominal delta by this factor.
inline constexpr double kFailureSlack = 1.5;

inline constexpr std::size_t kMatmulTrials = 100;
inline constexpr std::size_t kMatmulMajority = 85;

inline constexpr std::size_t kInnerProductTrials = 1000;
inline constexpr std::size_t kDavisKahanPairs = 1000;

/// Fraction of queried entries that must fall inside the composite budget.
inline constexpr double kEntryCoverage = 0.95;
inline constexpr std::size_t kQueriedEntries = 500;

/// Relative Frobenius error allowed for the end-to-end pipeline.
inline constexpr double kEndToEndRelative = 0.2;

/// Growth allowed for X-entry reads when n grows 16x.
inline constexpr double kSublinearGrowth = 3.0;
/// The linear baseline must grow within this relative distance of the n ratio.
inline constexpr double kLinearTolerance = 0.1;

/// Exact-oracle constraint tolerances.
inline constexpr double kMeanTolerance = 1e-8;
inline constexpr double kVarianceTolerance = 1e-6;
inline constexpr double kCorrelationTolerance = 1e-6;
inline constexpr double kSlowSourceCorrelation = 0.95;

}  // namespace sketch_sfa::verify::policy
