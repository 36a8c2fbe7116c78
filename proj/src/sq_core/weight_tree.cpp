#include "sketch_sfa/sq_core/weight_tree.hpp"

#include <bit>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa {

namespace detail {

std::size_t tree_capacity(std::size_t n) noexcept { return n <= 1 ? 1 : std::bit_ceil(n); }

unsigned tree_depth(std::size_t cap) noexcept { return static_cast<unsigned>(std::countr_zero(cap)); }

void aggregate(std::span<double> nodes, std::size_t cap) noexcept {
  for (std::size_t k = cap - 1; k >= 1; --k) nodes[k] = nodes[2 * k] + nodes[2 * k + 1];
}

unsigned set_leaf(std::span<double> nodes, std::size_t cap, std::size_t leaf, double weight) noexcept {
  std::size_t k = cap + leaf;
  nodes[k] = weight;
  unsigned written = 1;
  for (k /= 2; k >= 1; k /= 2) {
    nodes[k] = nodes[2 * k] + nodes[2 * k + 1];
    ++written;
  }
  return written;
}

std::size_t descend(std::span<const double> nodes, std::size_t cap, double u) noexcept {
  double target = u * nodes[1];
  std::size_t k = 1;
  while (k < cap) {
    const double left = nodes[2 * k];
    const double right = nodes[2 * k + 1];
    if ((target < left && left > 0.0) || !(right > 0.0)) {
      k = 2 * k;
    } else {
      target -= left;
      k = 2 * k + 1;
    }
  }
  return k - cap;
}

std::uint64_t descend_counts(std::span<const double> nodes, std::size_t cap, std::size_t draws, Rng& rng,
                             std::vector<std::pair<std::size_t, std::size_t>>& out) {
  std::uint64_t touched = 1;
  // Explicit stack of (node, draws); right child pushed first so leaves come out ascending.
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  if (draws > 0) stack.emplace_back(1, draws);
  while (!stack.empty()) {
    const auto [k, c] = stack.back();
    stack.pop_back();
    if (k >= cap) {
      out.emplace_back(k - cap, c);
      continue;
    }
    const double left = nodes[2 * k];
    const double right = nodes[2 * k + 1];
    touched += 2;
    std::size_t to_left = 0;
    if (!(right > 0.0)) {
      to_left = c;
    } else if (left > 0.0) {
      const double p = std::min(1.0, left / (left + right));
      to_left = static_cast<std::size_t>(std::binomial_distribution<std::uint64_t>(c, p)(rng));
    }
    if (c > to_left) stack.emplace_back(2 * k + 1, c - to_left);
    if (to_left > 0) stack.emplace_back(2 * k, to_left);
  }
  return touched;
}

}  // namespace detail

namespace {

void check_finite(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw InvalidInput("non-finite entry at index " + std::to_string(i));
    }
  }
}

}  // namespace

WeightTree::WeightTree(std::span<const double> values, std::shared_ptr<CostLedger> ledger)
    : values_(values.begin(), values.end()),
      cap_(detail::tree_capacity(values.size())),
      depth_(detail::tree_depth(cap_)),
      ledger_(std::move(ledger)) {
  if (values.empty()) throw InvalidInput("cannot build a weight tree over an empty vector");
  check_finite(values);
  nodes_.assign(2 * cap_, 0.0);
  for (std::size_t i = 0; i < values_.size(); ++i) nodes_[cap_ + i] = values_[i] * values_[i];
  detail::aggregate(nodes_, cap_);
  if (ledger_) ledger_->read_entries(values_.size());
}

double WeightTree::query(std::size_t i) const {
  if (i >= values_.size()) {
    throw IndexError("index " + std::to_string(i) + " out of range for vector of size " +
                     std::to_string(values_.size()));
  }
  if (ledger_) ledger_->read_entries(1);
  return values_[i];
}

void WeightTree::update(std::size_t i, double value) {
  if (i >= values_.size()) {
    throw IndexError("index " + std::to_string(i) + " out of range for vector of size " +
                     std::to_string(values_.size()));
  }
  if (!std::isfinite(value)) throw InvalidInput("non-finite update value");
  values_[i] = value;
  const unsigned written = detail::set_leaf(nodes_, cap_, i, value * value);
  if (ledger_) ledger_->touch_nodes(written);
  if (++updates_ >= kReaggregateEvery) reaggregate();
}

std::size_t WeightTree::sample(Rng& rng) const {
  if (!(nodes_[1] > 0.0)) throw DegenerateDistribution("cannot sample from an all-zero vector");
  const std::size_t i = detail::descend(nodes_, cap_, rng.uniform());
  if (ledger_) {
    ledger_->touch_nodes(2 * depth_ + 1);
    ledger_->draw(1);
  }
  return i;
}

std::vector<std::pair<std::size_t, std::size_t>> WeightTree::sample_counts(std::size_t draws, Rng& rng) const {
  if (!(nodes_[1] > 0.0)) throw DegenerateDistribution("cannot sample from an all-zero vector");
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::uint64_t touched = detail::descend_counts(nodes_, cap_, draws, rng, out);
  if (ledger_) {
    ledger_->touch_nodes(touched);
    ledger_->draw(touched / 2);
  }
  return out;
}

double WeightTree::norm() const noexcept { return std::sqrt(nodes_[1]); }

double WeightTree::probability(std::size_t i) const {
  if (i >= values_.size()) throw IndexError("index out of range");
  if (!(nodes_[1] > 0.0)) throw DegenerateDistribution("all-zero vector has no sampling distribution");
  return nodes_[cap_ + i] / nodes_[1];
}

void WeightTree::reaggregate() noexcept {
  for (std::size_t i = 0; i < values_.size(); ++i) nodes_[cap_ + i] = values_[i] * values_[i];
  detail::aggregate(nodes_, cap_);
  updates_ = 0;
}

WeightTree build_vector(std::span<const double> values, std::shared_ptr<CostLedger> ledger) {
  return WeightTree(values, std::move(ledger));
}

}  // namespace sketch_sfa
