#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sketch_sfa/verify/experiment.hpp"
#include "sketch_sfa/verify/trial_report.hpp"

namespace sketch_sfa::verify {

struct ReadPoint {
  std::size_t n = 0;
  std::uint64_t sampled_reads = 0;  // X-entry reads of the sampled pipeline
  std::uint64_t exact_reads = 0;    // X-entry reads of the dense baseline
  double relative_error = 0.0;
};

struct SublinearityResult {
  std::vector<ReadPoint> points;  // ascending n
  double n_ratio = 1.0;           // n_max / n_min
  double sampled_growth = 1.0;    // reads(n_max) / reads(n_min)
  double exact_growth = 1.0;
  /// (log n_max / log n_min)^4, the growth a degree-4 polylog allows.
  double polylog_limit = 1.0;
  /// Least-squares p in reads ~ c (log n)^p; 0 for a single grid point.
  double polylog_exponent = 0.0;
  /// Largest sampled / baseline read ratio over the grid.
  double baseline_fraction = 0.0;
};

/// X-entry reads of the dense oracle: X is read through a counting
/// structure and then solved exactly.
std::uint64_t exact_baseline_reads(const Eigen::MatrixXd& x, const exact::DiffMatrix& diff, std::size_t j);

/// One grid point: the sampled pipeline (estimated spectra) and the dense
/// baseline on a blob dataset of n rows.
ReadPoint measure_read_point(const ExperimentConfig& config, std::size_t n, std::uint64_t seed);

/// Growth statistics over points of distinct n, in any order.
SublinearityResult summarize_points(std::vector<ReadPoint> points);

/// Runs the sampled pipeline (estimated spectra) and the dense baseline on
/// identically distributed blob datasets of each size in `n_grid`. The same
/// seed is used at every n, so only the size changes.
SublinearityResult measure_sublinearity(const ExperimentConfig& config, std::span<const std::size_t> n_grid,
                                        std::uint64_t seed);

/// Two reports: sampled read growth at most the polylog limit, and sampled
/// reads nowhere above the linear-scan baseline.
std::vector<TrialReport> sublinearity_audit(const ExperimentConfig& config, std::span<const std::size_t> n_grid,
                                            std::uint64_t seed);

nlohmann::json to_json(const SublinearityResult& r);

}  // namespace sketch_sfa::verify
