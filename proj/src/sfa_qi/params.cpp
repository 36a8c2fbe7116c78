#include "sketch_sfa/sfa_qi/params.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sketch_sfa/sfa_exact/exact_sfa.hpp"
#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::qi {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw InvalidInput(std::string("parameter selection: ") + name + " must be positive, got " + std::to_string(v));
  }
}

}  // namespace

SpectralSummary summarize(const exact::SfaResult& oracle) {
  SpectralSummary s;
  s.x_frobenius = oracle.x_frobenius;
  s.xdot_frobenius = oracle.xdot_frobenius;
  s.x_spectral = oracle.x_singular(0);
  s.xdot_spectral = oracle.xdot_spectral;
  s.theta = oracle.theta;
  s.gamma = oracle.gamma;
  s.sigma = 0.0;
  s.gap = oracle.x_gaps.size() ? oracle.x_gaps.minCoeff() / (s.x_frobenius * s.x_frobenius) : 1.0;
  s.rank = oracle.rank;
  return s;
}

PipelineParams select_parameters(double eps_target, const SpectralSummary& spectra, std::size_t d, std::size_t j,
                                 std::uint64_t seed) {
  if (!(eps_target > 0.0 && eps_target < 1.0)) throw InvalidInput("parameter selection: eps must lie in (0, 1)");
  if (d == 0 || j == 0 || j > d) throw InvalidInput("parameter selection: need 1 <= J <= d");
  require_positive(spectra.x_frobenius, "|X|_F");
  require_positive(spectra.xdot_frobenius, "|Xdot|_F");
  require_positive(spectra.x_spectral, "|X|");
  require_positive(spectra.xdot_spectral, "|Xdot|");
  require_positive(spectra.theta, "theta");
  require_positive(spectra.gamma, "gamma");
  require_positive(spectra.gap, "gap");
  if (spectra.sigma != 0.0) require_positive(spectra.sigma, "sigma");

  PipelineParams p;
  p.eps_target = eps_target;
  p.d = d;
  p.j = j;
  p.seed = seed;
  p.spectra = spectra;
  const double eps = eps_target;
  const double rj = std::sqrt(static_cast<double>(j));
  const double xf = spectra.x_frobenius;
  const double xdf = spectra.xdot_frobenius;
  const double xd = spectra.xdot_spectral;
  const double theta = spectra.theta;
  const double eta = spectra.gap;
  const double sigma = spectra.sigma > 0.0 ? spectra.sigma : theta / 2.0;

  p.eps1_prime = std::min(eps / std::sqrt(static_cast<double>(d)), eps * sigma * sigma * theta / (xf * xf * xd * rj));
  p.eps5_prime = eps / rj;
  p.eps1 = std::min({p.eps1_prime * xf * xf * xf / (sigma * sigma * sigma), p.eps1_prime * p.eps1_prime * eta,
                     sigma / (4.0 * xf * xf)});
  p.eta1 = p.eps1;
  p.eps2 = eps;
  p.eps3 = eps / (xdf * rj);
  p.eps4 = eps / rj;
  p.eps5 = std::min({p.eps5_prime * xdf * xdf * xdf / (theta * theta * theta * sigma * sigma * sigma),
                     p.eps1_prime * p.eps1_prime * eta, sigma * theta * theta / (4.0 * xdf * xdf)});

  const double denominator = xd / spectra.x_spectral - spectra.gamma / 10.0;
  if (!(denominator > 0.0)) {
    throw InvalidInput("parameter selection: |Xdot| / |X| - gamma / 10 = " + std::to_string(denominator) +
                       " is not positive");
  }
  p.eta5_printed = 1.0 / denominator;
  p.eta5 = std::min(p.eta5_printed, kEtaMax);

  // Union bound: two SVDs at 1/10 each, the matrix products share the rest of 1/3.
  p.delta1 = 0.1;
  p.delta5 = 0.1;
  p.delta2 = (1.0 / 3.0 - p.delta1 - p.delta5) / 2.0;
  p.delta4 = p.delta2;
  p.sigma_threshold = sigma;
  p.gamma_threshold = spectra.gamma;
  p.predicted = predict_errors(p);
  return p;
}

ErrorPrediction predict_errors(const PipelineParams& p, double e4_measured) {
  ErrorPrediction e;
  const auto& s = p.spectra;
  const double d = static_cast<double>(p.d);
  const double r = static_cast<double>(s.rank ? s.rank : p.d);
  const double sr_eps = std::sqrt(r) * p.eps1;
  const double theta = s.theta;
  e.e2 = std::sqrt(d) * p.eps1 * (1.0 + p.eta1 * p.eps1 * p.eps1) + p.eps2;

  e.e3_printed = sr_eps / theta + (1.0 + sr_eps) * (2.0 + sr_eps) / theta + p.eps3;
  // |sigma_hat - sigma| <= slack for every retained value.
  const double slack = p.eta1 * s.x_frobenius / 10.0;
  e.e3_rederived = theta > slack ? sr_eps / theta + (1.0 + sr_eps) * std::sqrt(r) * slack / (theta * (theta - slack)) +
                                       (1.0 + sr_eps) * sr_eps / (theta - slack) + p.eps3
                                 : std::numeric_limits<double>::infinity();

  e.e4_printed = s.xdot_spectral * e.e3_printed + p.eps4;
  e.e4_rederived = e4_measured >= 0.0 ? e4_measured : s.xdot_spectral * e.e3_rederived + p.eps4;
  if (e4_measured >= 0.0) e.e4_printed = e4_measured;

  const double rj = std::sqrt(static_cast<double>(p.j));
  const double denominator = p.eta5 * (s.xdot_spectral / s.x_spectral - s.gamma / 10.0);
  e.e5_printed = rj * (e.e4_printed / denominator + p.eps5);
  e.e5_rederived = rj * (e.e4_rederived / denominator + p.eps5);
  e.total_printed = e.e5_printed + e.e2 * (1.0 + e.e5_printed);
  e.total_rederived = e.e5_rederived + e.e2 * (1.0 + e.e5_rederived);
  return e;
}

void to_json(nlohmann::json& j, const SpectralSummary& s) {
  j = {{"x_frobenius", s.x_frobenius}, {"xdot_frobenius", s.xdot_frobenius}, {"x_spectral", s.x_spectral},
       {"xdot_spectral", s.xdot_spectral}, {"theta", s.theta}, {"gamma", s.gamma},
       {"sigma", s.sigma}, {"gap", s.gap}, {"rank", s.rank}};
}

void from_json(const nlohmann::json& j, SpectralSummary& s) {
  s.x_frobenius = j.at("x_frobenius").get<double>();
  s.xdot_frobenius = j.at("xdot_frobenius").get<double>();
  s.x_spectral = j.at("x_spectral").get<double>();
  s.xdot_spectral = j.at("xdot_spectral").get<double>();
  s.theta = j.at("theta").get<double>();
  s.gamma = j.at("gamma").get<double>();
  s.sigma = j.value("sigma", 0.0);
  s.gap = j.at("gap").get<double>();
  s.rank = j.value("rank", std::size_t{0});
}

void to_json(nlohmann::json& j, const ErrorPrediction& e) {
  j = {{"e2", e.e2}, {"e3_printed", e.e3_printed}, {"e3_rederived", e.e3_rederived},
       {"e4_printed", e.e4_printed}, {"e4_rederived", e.e4_rederived}, {"e5_printed", e.e5_printed},
       {"e5_rederived", e.e5_rederived}, {"total_printed", e.total_printed},
       {"total_rederived", e.total_rederived}};
}

void to_json(nlohmann::json& j, const PipelineParams& p) {
  j = {{"eps_target", p.eps_target}, {"eps1_prime", p.eps1_prime}, {"eps5_prime", p.eps5_prime},
       {"eps1", p.eps1}, {"eps2", p.eps2}, {"eps3", p.eps3}, {"eps4", p.eps4}, {"eps5", p.eps5},
       {"eta1", p.eta1}, {"eta5_printed", p.eta5_printed}, {"eta5", p.eta5}, {"delta1", p.delta1},
       {"delta2", p.delta2}, {"delta4", p.delta4}, {"delta5", p.delta5},
       {"sigma_threshold", p.sigma_threshold}, {"gamma_threshold", p.gamma_threshold}, {"d", p.d},
       {"J", p.j}, {"seed", p.seed}, {"spectra", p.spectra}, {"predicted", p.predicted}};
}

void from_json(const nlohmann::json& j, PipelineParams& p) {
  const auto spectra = j.at("spectra").get<SpectralSummary>();
  p = select_parameters(j.at("eps_target").get<double>(), spectra, j.at("d").get<std::size_t>(),
                        j.at("J").get<std::size_t>(), j.value("seed", std::uint64_t{0}));
}

}  // namespace sketch_sfa::qi
