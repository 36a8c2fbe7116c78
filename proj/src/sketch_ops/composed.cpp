#include "sketch_sfa/sketch_ops/composed.hpp"

#include <cmath>
#include <string>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::sketch {

ProductRowsSQ::ProductRowsSQ(std::shared_ptr<const SQMatrix> a, Eigen::MatrixXd m, Rng& rng,
                             ProductRowsOptions options)
    : a_(std::move(a)), m_(std::move(m)), options_(options) {
  if (!a_) throw InvalidInput("product rows: null matrix");
  if (static_cast<std::size_t>(m_.rows()) != a_->cols()) {
    throw InvalidInput("product rows: inner dimensions " + std::to_string(a_->cols()) + " and " +
                       std::to_string(m_.rows()) + " differ");
  }
  if (m_.cols() == 0 || !m_.allFinite()) throw InvalidInput("product rows: right factor must be finite and non-empty");
  if (options_.norm_samples == 0) throw InvalidInput("product rows: norm_samples must be positive");
  m_norm_ = Eigen::JacobiSVD<Eigen::MatrixXd>(m_).singularValues()(0);

  // |A M|_F^2 = |A|_F^2 E_{i ~ D_Ã}[ |A_i M|^2 / |A_i|^2 ].
  const double a_frob = a_->frobenius_squared();
  if (!(a_frob > 0.0)) throw DegenerateDistribution("product rows: left factor is zero");
  double sum = 0.0;
  for (std::size_t s = 0; s < options_.norm_samples; ++s) {
    const std::size_t i = a_->sample_row(rng);
    const Eigen::VectorXd ai = a_->row(i);
    sum += (m_.transpose() * ai).squaredNorm() / ai.squaredNorm();
  }
  frobenius_sq_ = a_frob * sum / static_cast<double>(options_.norm_samples);
}

Eigen::VectorXd ProductRowsSQ::product_row(std::size_t i) const {
  if (i >= rows()) throw IndexError("product rows: row index out of range");
  return m_.transpose() * a_->row(i);
}

double ProductRowsSQ::entry(std::size_t i, std::size_t j) const {
  if (j >= cols()) throw IndexError("product rows: column index out of range");
  return a_->row(i).dot(m_.col(static_cast<Eigen::Index>(j)));
}

void ProductRowsSQ::read_row(std::size_t i, std::span<double> out) const {
  const Eigen::VectorXd r = product_row(i);
  for (std::size_t j = 0; j < cols(); ++j) out[j] = r(static_cast<Eigen::Index>(j));
}

double ProductRowsSQ::row_squared_norm(std::size_t i) const { return product_row(i).squaredNorm(); }

std::size_t ProductRowsSQ::sample_row(Rng& rng) const {
  if (!(m_norm_ > 0.0)) throw DegenerateDistribution("product rows: right factor is zero");
  const double m_sq = m_norm_ * m_norm_;
  double mass = 0.0;
  for (std::uint64_t t = 1;; ++t) {
    const std::size_t i = a_->sample_row(rng);
    const Eigen::VectorXd ai = a_->row(i);
    const double acceptance = std::min(1.0, (m_.transpose() * ai).squaredNorm() / (ai.squaredNorm() * m_sq));
    mass += acceptance;
    const bool accepted = rng.uniform() < acceptance;
    if (accepted || t >= options_.hard_trial_cap) {
      std::lock_guard lock(stats_mutex_);
      ++stats_.calls;
      stats_.trials += t;
      stats_.acceptance_mass += mass;
      if (accepted) {
        ++stats_.accepted;
        return i;
      }
      throw RejectionStall("product rows: no acceptance after " + std::to_string(t) + " trials");
    }
  }
}

std::size_t ProductRowsSQ::sample_in_row(std::size_t i, Rng& rng) const {
  const Eigen::VectorXd r = product_row(i);
  const double total = r.squaredNorm();
  if (!(total > 0.0)) throw DegenerateDistribution("product rows: row " + std::to_string(i) + " is zero");
  const double target = rng.uniform() * total;
  double running = 0.0;
  std::size_t last_nonzero = 0;
  for (Eigen::Index j = 0; j < r.size(); ++j) {
    const double w = r(j) * r(j);
    if (w > 0.0) last_nonzero = static_cast<std::size_t>(j);
    running += w;
    if (w > 0.0 && target < running) return static_cast<std::size_t>(j);
  }
  return last_nonzero;
}

RejectionStats ProductRowsSQ::stats() const {
  std::lock_guard lock(stats_mutex_);
  return stats_;
}

}  // namespace sketch_sfa::sketch
