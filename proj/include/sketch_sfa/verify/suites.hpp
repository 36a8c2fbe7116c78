#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sketch_sfa/verify/trial_report.hpp"

namespace sketch_sfa::verify {

struct SuiteOptions {
  /// Every suite derives its seeds from this one value.
  std::uint64_t base_seed = 20240601;
};

/// A named group of checks. Required suites decide the verify exit code;
/// the others are reported for information.
struct Suite {
  std::string name;
  std::string title;
  /// Acceptance criterion number, 0 for informational suites.
  int criterion = 0;
  double time_limit_seconds = 0.0;
  bool required = true;
  std::function<std::vector<TrialReport>(const SuiteOptions&)> run;
};

/// Stored-vector and stored-matrix sampling against D_x by chi-square, and
/// per-sample node touches against 2 ceil(log2 n) + 2 up to n = 2^20.
std::vector<TrialReport> sampling_suite(const SuiteOptions& options);
/// Approximate SVD of rank-5 512 x 64 instances: subspace and singular-value accuracy.
std::vector<TrialReport> approx_svd_suite(const SuiteOptions& options);
/// Sampled matrix product within eps over 100 trials.
std::vector<TrialReport> approx_matmul_suite(const SuiteOptions& options);
/// Median-of-means inner products: failure rate over 1000 trials per (eps, delta).
std::vector<TrialReport> inner_product_suite(const SuiteOptions& options);
/// Eigenvector perturbation bound on random symmetric pairs and flagged near-ties.
std::vector<TrialReport> davis_kahan_suite(const SuiteOptions& options);
/// Constraint invariants of the dense solution and the slow-source toy signal.
std::vector<TrialReport> exact_sfa_suite(const SuiteOptions& options);
/// Sampled pipeline on blobs against the dense oracle, in Frobenius and per entry.
std::vector<TrialReport> end_to_end_suite(const SuiteOptions& options);
/// X-entry reads of the sampled pipeline and the dense baseline as n grows 16x.
std::vector<TrialReport> sublinearity_suite(const SuiteOptions& options);
/// Per-step error bounds of the pipeline (informational).
std::vector<TrialReport> error_budget_suite(const SuiteOptions& options);

const std::vector<Suite>& suite_registry();

/// Runs one suite by name, or every suite for "all". Unknown names raise
/// InvalidInput. Runtime is recorded on every report.
std::vector<TrialReport> run_suite(const std::string& name, const SuiteOptions& options);

}  // namespace sketch_sfa::verify
