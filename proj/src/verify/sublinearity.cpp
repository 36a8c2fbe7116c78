#include "sketch_sfa/verify/sublinearity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/matrix_sq.hpp"

namespace sketch_sfa::verify {

std::uint64_t exact_baseline_reads(const Eigen::MatrixXd& x, const exact::DiffMatrix& diff, std::size_t j) {
  auto ledger = std::make_shared<CostLedger>();
  const MatrixSQ stored = build_matrix(x, ledger);
  // Building the structure is preprocessing on both paths; only the solver's reads count.
  ledger->reset();
  exact::exact_sfa(stored.materialize(), diff, j);
  return ledger->snapshot().entry_reads;
}

ReadPoint measure_read_point(const ExperimentConfig& config, std::size_t n, std::uint64_t seed) {
  ExperimentConfig c = config;
  c.blobs.n = n;
  c.spectra = SpectraSource::Estimated;
  const BlobExperiment e = run_blob_experiment(c, seed);
  ReadPoint p;
  p.n = n;
  p.sampled_reads = e.x_entry_reads();
  p.exact_reads = exact_baseline_reads(e.data.x, e.diff, c.j);
  p.relative_error = e.relative_output_error();
  return p;
}

SublinearityResult summarize_points(std::vector<ReadPoint> points) {
  if (points.empty()) throw InvalidInput("sublinearity: no grid points");
  std::sort(points.begin(), points.end(), [](const ReadPoint& a, const ReadPoint& b) { return a.n < b.n; });
  SublinearityResult out;
  out.points = std::move(points);
  const ReadPoint& lo = out.points.front();
  const ReadPoint& hi = out.points.back();
  out.n_ratio = static_cast<double>(hi.n) / static_cast<double>(lo.n);
  out.sampled_growth = static_cast<double>(hi.sampled_reads) / static_cast<double>(lo.sampled_reads);
  out.exact_growth = static_cast<double>(hi.exact_reads) / static_cast<double>(lo.exact_reads);
  out.polylog_limit = std::pow(std::log(static_cast<double>(hi.n)) / std::log(static_cast<double>(lo.n)), 4.0);
  for (const auto& p : out.points) {
    out.baseline_fraction =
        std::max(out.baseline_fraction, static_cast<double>(p.sampled_reads) / static_cast<double>(p.exact_reads));
  }
  if (out.points.size() > 1) {
    // Slope of log reads against log log n.
    Eigen::MatrixXd design(static_cast<Eigen::Index>(out.points.size()), 2);
    Eigen::VectorXd target(design.rows());
    for (Eigen::Index k = 0; k < design.rows(); ++k) {
      const auto& p = out.points[static_cast<std::size_t>(k)];
      design(k, 0) = 1.0;
      design(k, 1) = std::log(std::log(static_cast<double>(p.n)));
      target(k) = std::log(static_cast<double>(p.sampled_reads));
    }
    out.polylog_exponent = design.colPivHouseholderQr().solve(target)(1);
  }
  return out;
}

SublinearityResult measure_sublinearity(const ExperimentConfig& config, std::span<const std::size_t> n_grid,
                                        std::uint64_t seed) {
  if (n_grid.empty()) throw InvalidInput("sublinearity: empty n grid");
  std::vector<std::size_t> grid(n_grid.begin(), n_grid.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<ReadPoint> points;
  for (std::size_t n : grid) points.push_back(measure_read_point(config, n, seed));
  return summarize_points(std::move(points));
}

nlohmann::json to_json(const SublinearityResult& r) {
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : r.points) {
    points.push_back({{"n", p.n},
                      {"sampled_reads", p.sampled_reads},
                      {"exact_reads", p.exact_reads},
                      {"relative_error", p.relative_error}});
  }
  return {{"points", points},
          {"n_ratio", r.n_ratio},
          {"sampled_growth", r.sampled_growth},
          {"exact_growth", r.exact_growth},
          {"polylog_limit", r.polylog_limit},
          {"polylog_exponent", r.polylog_exponent},
          {"baseline_fraction", r.baseline_fraction}};
}

std::vector<TrialReport> sublinearity_audit(const ExperimentConfig& config, std::span<const std::size_t> n_grid,
                                            std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const SublinearityResult res = measure_sublinearity(config, n_grid, seed);
  const nlohmann::json details = to_json(res);
  std::vector<TrialReport> reports;
  reports.push_back(
      make_report("sublinearity.polylog_growth", {seed}, res.sampled_growth, Comparator::AtMost, res.polylog_limit));
  reports.push_back(
      make_report("sublinearity.below_linear_scan", {seed}, res.baseline_fraction, Comparator::AtMost, 1.0));
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto& r : reports) {
    r.details = details;
    r.runtime_seconds = elapsed / 2.0;
  }
  return reports;
}

}  // namespace sketch_sfa::verify
