#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sketch_sfa/verify/experiment.hpp"
#include "sketch_sfa/verify/trial_report.hpp"

namespace sketch_sfa::verify {

/// Frobenius discrepancies of the pipeline intermediates against the dense
/// oracle, all on the scaled conventions of the model (X_s = X / sqrt(n)).
struct StepErrors {
  double e2 = 0.0;     // |Z_s - Z_hat|
  double e3 = 0.0;     // |B^{-1/2} - B_hat^{-1/2}|
  double e4 = 0.0;     // |Zdot - Zdot_hat|
  double e5 = 0.0;     // |W - W_hat| after column alignment
  double total = 0.0;  // |Z_s W - Z_hat W_hat| after column alignment
};

/// Densifies every intermediate; desk-scale instances only.
StepErrors measure_step_errors(const BlobExperiment& e);

/// One report per bound (E2; E3, E4, E5 and the total both as printed and
/// re-derived; E5 and the total again with the measured E4), plus the
/// relative output error against eps_target. Each counts the seeds whose
/// measurement is within its bound and passes at the seed majority.
/// Reports are flagged when a sketch was clamped below its prescribed size
/// or the step-5 gap fraction was clamped, since the bound then assumes a
/// sketch the run did not take.
std::vector<TrialReport> error_budget_audit(const ExperimentConfig& config, std::span<const std::uint64_t> seeds);

}  // namespace sketch_sfa::verify
