#include "sketch_sfa/sketch_ops/sq_matvec.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::sketch {

MatVecVector::MatVecVector(std::shared_ptr<const SQMatrix> vt, Eigen::VectorXd w, MatVecOptions options)
    : vt_(std::move(vt)), w_(std::move(w)), options_(options) {
  if (!vt_) throw InvalidInput("sq_matvec: null matrix");
  if (static_cast<std::size_t>(w_.size()) != vt_->rows()) {
    throw InvalidInput("sq_matvec: weight length " + std::to_string(w_.size()) + " does not match " +
                       std::to_string(vt_->rows()) + " columns");
  }
  if (!w_.allFinite()) throw InvalidInput("sq_matvec: non-finite weight");
  if (!(options_.cap_factor > 0.0) || options_.hard_trial_cap == 0) throw InvalidInput("sq_matvec: bad options");
  std::vector<double> amplitude(vt_->rows());
  for (std::size_t j = 0; j < amplitude.size(); ++j) {
    amplitude[j] = std::abs(w_(static_cast<Eigen::Index>(j))) * std::sqrt(vt_->row_squared_norm(j));
    if (amplitude[j] > 0.0) ++k_;
  }
  proposal_ = std::make_shared<const WeightTree>(amplitude);
  proposal_mass_ = proposal_->squared_norm();
}

double MatVecVector::query(std::size_t i) const {
  if (i >= size()) throw IndexError("sq_matvec: query index out of range");
  double sum = 0.0;
  for (std::size_t j = 0; j < vt_->rows(); ++j) sum += w_(static_cast<Eigen::Index>(j)) * vt_->entry(j, i);
  return sum;
}

std::pair<std::size_t, double> MatVecVector::propose(Rng& rng) const {
  const std::size_t j = proposal_->sample(rng);
  const std::size_t i = vt_->sample_in_row(j, rng);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t l = 0; l < vt_->rows(); ++l) {
    const double term = w_(static_cast<Eigen::Index>(l)) * vt_->entry(l, i);
    sum += term;
    sum_sq += term * term;
  }
  // sum_sq > 0: the sampled i has V(i, j) != 0 and w_j != 0.
  return {i, (sum * sum) / (static_cast<double>(k_) * sum_sq)};
}

void MatVecVector::record(std::uint64_t trials, double mass, bool accepted) const {
  std::lock_guard lock(stats_mutex_);
  ++stats_.calls;
  stats_.trials += trials;
  stats_.acceptance_mass += mass;
  if (accepted) ++stats_.accepted;
}

std::size_t MatVecVector::sample(Rng& rng) const {
  if (!(proposal_mass_ > 0.0)) throw DegenerateDistribution("sq_matvec: V w has zero proposal mass");
  const double k = static_cast<double>(k_);
  double local_mass = 0.0;
  for (std::uint64_t t = 1;; ++t) {
    const auto [i, acceptance] = propose(rng);
    local_mass += acceptance;
    if (rng.uniform() < acceptance) {
      record(t, local_mass, true);
      return i;
    }
    if (t >= options_.hard_trial_cap) {
      record(t, local_mass, false);
      throw RejectionStall("sq_matvec: no acceptance after " + std::to_string(t) + " trials");
    }
    if (t % 256 == 0) {
      RejectionStats seen = stats();
      const double trials = static_cast<double>(seen.trials + t);
      const double mass = seen.acceptance_mass + local_mass;
      if (trials < options_.cap_factor * k) continue;
      const double c_hat = mass > 0.0 ? trials / (k * mass) : std::numeric_limits<double>::infinity();
      if (static_cast<double>(t) > options_.cap_factor * k * c_hat) {
        record(t, local_mass, false);
        throw RejectionStall("sq_matvec: " + std::to_string(t) + " trials exceed the cap for estimated overhead " +
                             std::to_string(c_hat));
      }
    }
  }
}

double MatVecVector::norm(double nu, Rng& rng) const {
  if (!(nu > 0.0 && nu < 1.0)) throw InvalidInput("sq_matvec: norm tolerance must lie in (0, 1)");
  if (!(proposal_mass_ > 0.0)) return 0.0;
  const double k = static_cast<double>(k_);
  // b = k * acceptance lies in [0, k] and has mean |Vw|^2 / proposal_mass = 1 / C.
  // Chebyshev with Var(b) <= k E[b] gives relative error nu w.p. 9/10 once
  // m >= 10 k C / nu^2.
  const auto pilot = static_cast<std::uint64_t>(std::ceil(64.0 * k));
  double sum = 0.0;
  std::uint64_t m = 0;
  for (; m < pilot; ++m) sum += k * propose(rng).second;
  if (!(sum > 0.0)) return 0.0;
  const double c_hat = static_cast<double>(m) / sum;
  const double wanted = std::min(std::ceil(10.0 * k * c_hat / (nu * nu)), static_cast<double>(options_.hard_trial_cap));
  const auto target = static_cast<std::uint64_t>(wanted);
  for (; m < target; ++m) sum += k * propose(rng).second;
  return std::sqrt(proposal_mass_ * sum / static_cast<double>(m));
}

double MatVecVector::overhead_estimate() const {
  const auto seen = stats();
  if (!(seen.acceptance_mass > 0.0)) return std::numeric_limits<double>::infinity();
  return static_cast<double>(seen.trials) / (static_cast<double>(k_) * seen.acceptance_mass);
}

RejectionStats MatVecVector::stats() const {
  std::lock_guard lock(stats_mutex_);
  return stats_;
}

HandleCosts MatVecVector::costs() const {
  const double k = static_cast<double>(std::max<std::size_t>(k_, 1));
  const double c = std::isfinite(overhead_estimate()) ? overhead_estimate() : 1.0;
  const double depth = std::log2(static_cast<double>(vt_->cols()) + 1.0) + std::log2(k + 1.0);
  const double proposal = 2.0 * depth + 2.0 + k;
  return {k * c * proposal, k, 10.0 * k * c * proposal};
}

SQHandle sq_matvec(std::shared_ptr<const SQMatrix> vt, Eigen::VectorXd w, MatVecOptions options) {
  return SQHandle(std::make_shared<MatVecVector>(std::move(vt), std::move(w), options));
}

}  // namespace sketch_sfa::sketch
