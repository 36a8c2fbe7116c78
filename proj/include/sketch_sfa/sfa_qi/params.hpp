#pragma once

#include <cstddef>
#include <cstdint>

#include <nlohmann/json.hpp>

namespace sketch_sfa::exact {
struct SfaResult;
}

namespace sketch_sfa::qi {

/// Spectral quantities of the scaled inputs X_s = X / sqrt(n) and
/// Xdot_s = Xdot / sqrt(C). All must be positive.
struct SpectralSummary {
  double x_frobenius = 0.0;     // |X|_F
  double xdot_frobenius = 0.0;  // |Xdot|_F
  double x_spectral = 0.0;      // |X|
  double xdot_spectral = 0.0;   // |Xdot|
  double theta = 0.0;           // smallest singular value of X
  double gamma = 0.0;           // smallest singular value of Zdot
  double sigma = 0.0;           // SVD threshold for X; 0 selects theta / 2
  double gap = 0.0;             // min_i (sigma_i^2 - sigma_{i+1}^2) / |X|_F^2 over X's spectrum
  std::size_t rank = 0;         // retained directions of X; 0 means d
};

SpectralSummary summarize(const exact::SfaResult& oracle);

/// Predicted step errors. E3 is given twice: as printed in the error chain,
/// whose middle term does not vanish with eps1, and re-derived from
/// |sigma_hat - sigma| <= eta1 |X|_F / 10.
struct ErrorPrediction {
  double e2 = 0.0;
  double e3_printed = 0.0;
  double e3_rederived = 0.0;
  double e4_printed = 0.0;
  double e4_rederived = 0.0;
  double e5_printed = 0.0;
  double e5_rederived = 0.0;
  double total_printed = 0.0;    // E5 + E2 (1 + E5)
  double total_rederived = 0.0;
};

struct PipelineParams {
  double eps_target = 0.0;
  double eps1_prime = 0.0;
  double eps5_prime = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double eps3 = 0.0;
  double eps4 = 0.0;
  double eps5 = 0.0;
  double eta1 = 0.0;
  double eta5_printed = 0.0;  // table value, may exceed 1
  double eta5 = 0.0;          // value used by the step-5 SVD, clamped to eta_max
  double delta1 = 0.1;
  double delta2 = 0.0;
  double delta4 = 0.0;
  double delta5 = 0.1;
  double sigma_threshold = 0.0;
  double gamma_threshold = 0.0;
  std::size_t d = 0;
  std::size_t j = 0;
  std::uint64_t seed = 0;
  SpectralSummary spectra;
  ErrorPrediction predicted;
};

/// Gap fractions at or above this are clamped before use.
inline constexpr double kEtaMax = 0.99;

/// Evaluates the parameter table for target error `eps_target`.
/// Throws InvalidInput on non-positive spectral inputs or when
/// |Xdot| / |X| - gamma / 10 <= 0.
PipelineParams select_parameters(double eps_target, const SpectralSummary& spectra, std::size_t d, std::size_t j,
                                 std::uint64_t seed = 0);

/// Error chain evaluated at `params`, with `e4_measured` replacing the
/// predicted E4 when non-negative.
ErrorPrediction predict_errors(const PipelineParams& params, double e4_measured = -1.0);

void to_json(nlohmann::json& j, const SpectralSummary& s);
void from_json(const nlohmann::json& j, SpectralSummary& s);
void to_json(nlohmann::json& j, const ErrorPrediction& e);
void to_json(nlohmann::json& j, const PipelineParams& p);
void from_json(const nlohmann::json& j, PipelineParams& p);

}  // namespace sketch_sfa::qi
