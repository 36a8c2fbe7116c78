#include "sketch_sfa/verify/davis_kahan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::verify {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0) throw InvalidInput(std::string(name) + " must be square and non-empty");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw InvalidInput(std::string(name) + " is not symmetric within 1e-10");
  }
}

}  // namespace

DavisKahanResult davis_kahan(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_hat) {
  check_symmetric(a, "A");
  check_symmetric(a_hat, "A_hat");
  if (a.rows() != a_hat.rows()) throw InvalidInput("A and A_hat differ in size");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> exact(a);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> perturbed(a_hat);
  const Eigen::MatrixXd e = a_hat - a;
  DavisKahanResult out;
  out.perturbation_norm = e.size() ? Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e, Eigen::EigenvaluesOnly)
                                         .eigenvalues()
                                         .cwiseAbs()
                                         .maxCoeff()
                                   : 0.0;
  const Eigen::VectorXd& lambda = exact.eigenvalues();
  const Eigen::VectorXd& lambda_hat = perturbed.eigenvalues();
  const double scale = std::max({lambda.cwiseAbs().maxCoeff(), lambda_hat.cwiseAbs().maxCoeff(), 1e-300});
  const double vanishing = kVanishingGapFactor * std::numeric_limits<double>::epsilon() * scale;
  const auto n = a.rows();

  for (Eigen::Index i = 0; i < n; ++i) {
    EigenvectorCheck c;
    c.index = static_cast<std::size_t>(i);
    const Eigen::VectorXd v = exact.eigenvectors().col(i);
    Eigen::VectorXd v_hat = perturbed.eigenvectors().col(i);
    if (v.dot(v_hat) < 0.0) v_hat = -v_hat;
    c.deviation = (v_hat - v).norm();
    double denom = std::numeric_limits<double>::infinity();
    if (i > 0) denom = std::min(denom, std::abs(lambda_hat(i - 1) - lambda(i)));
    if (i + 1 < n) denom = std::min(denom, std::abs(lambda_hat(i + 1) - lambda(i)));
    c.denominator = denom;
    if (n == 1) {
      // A 1x1 eigenvector is +-1 whatever the perturbation.
      c.bound = 0.0;
      c.violated = c.deviation > 0.0;
    } else if (denom <= vanishing) {
      c.skipped = true;
    } else {
      c.bound = out.perturbation_norm / denom;
      c.near_degenerate = c.bound >= std::numbers::sqrt2 || denom <= 2.0 * out.perturbation_norm;
      // Round-off in the two eigensolvers is allowed a few ulps of slack.
      c.slack = 64.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale / denom);
      c.violated = c.deviation > c.bound + c.slack;
    }
    out.violated = out.violated || c.violated;
    out.flagged = out.flagged || c.skipped || c.near_degenerate;
    out.checks.push_back(c);
  }
  return out;
}

TrialReport davis_kahan_check(const Eigen::MatrixXd& a, const Eigen::MatrixXd& a_hat) {
  const DavisKahanResult res = davis_kahan(a, a_hat);
  double worst = 0.0;
  nlohmann::json per_index = nlohmann::json::array();
  for (const auto& c : res.checks) {
    if (!c.skipped) {
      const double allowed = c.bound + c.slack;
      worst = std::max(worst, allowed > 0.0 ? c.deviation / allowed
                                            : (c.deviation > 0.0 ? std::numeric_limits<double>::infinity() : 0.0));
    }
    per_index.push_back({{"index", c.index},
                         {"deviation", c.deviation},
                         {"bound", c.bound},
                         {"denominator", c.denominator},
                         {"slack", c.slack},
                         {"margin", c.margin()},
                         {"skipped", c.skipped},
                         {"near_degenerate", c.near_degenerate},
                         {"violated", c.violated}});
  }
  TrialReport r = make_report("davis_kahan", {}, worst, Comparator::AtMost, 1.0);
  r.flagged = res.flagged;
  r.details = {{"perturbation_norm", res.perturbation_norm}, {"indices", per_index}};
  if (res.flagged) r.notes.emplace_back("vanishing or small eigengap: bound not informative for some indices");
  return r;
}

}  // namespace sketch_sfa::verify
