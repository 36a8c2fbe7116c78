#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "sketch_sfa/sq_core/cost_ledger.hpp"
#include "sketch_sfa/sq_core/rng.hpp"

namespace sketch_sfa {

namespace detail {

// Implicit complete binary tree over `cap` leaves (cap a power of two):
// node 1 is the root, node k has children 2k and 2k+1, leaf i sits at cap+i.
// Slot 0 is unused.
std::size_t tree_capacity(std::size_t n) noexcept;
unsigned tree_depth(std::size_t cap) noexcept;
void aggregate(std::span<double> nodes, std::size_t cap) noexcept;
// Writes leaf weight and refreshes the path to the root. Returns nodes written.
unsigned set_leaf(std::span<double> nodes, std::size_t cap, std::size_t leaf, double weight) noexcept;
// Single root-to-leaf descent. `u` is uniform in [0, 1). Never returns a leaf
// of zero weight as long as the root is positive.
std::size_t descend(std::span<const double> nodes, std::size_t cap, double u) noexcept;
// Splits `draws` samples down the tree with a binomial at every internal node,
// which gives the same multinomial counts as `draws` single descents. Appends
// (leaf, count) in ascending leaf order; returns nodes read.
std::uint64_t descend_counts(std::span<const double> nodes, std::size_t cap, std::size_t draws, Rng& rng,
                             std::vector<std::pair<std::size_t, std::size_t>>& out);

}  // namespace detail

/// Sampling structure over a vector v: leaves keep v(i) and v(i)^2, internal
/// nodes keep partial sums of squares. O(log n) update and sample, O(1) norm.
class WeightTree {
 public:
  /// Forced re-aggregation period, bounding accumulated summation drift.
  static constexpr std::uint64_t kReaggregateEvery = 1'000'000;

  explicit WeightTree(std::span<const double> values, std::shared_ptr<CostLedger> ledger = nullptr);

  std::size_t size() const noexcept { return values_.size(); }
  std::size_t capacity() const noexcept { return cap_; }
  unsigned depth() const noexcept { return depth_; }

  double query(std::size_t i) const;
  void update(std::size_t i, double value);
  std::size_t sample(Rng& rng) const;
  /// `draws` samples aggregated as (index, count), ascending. Cost grows with
  /// the number of distinct indices hit, not with `draws`.
  std::vector<std::pair<std::size_t, std::size_t>> sample_counts(std::size_t draws, Rng& rng) const;

  double squared_norm() const noexcept { return nodes_[1]; }
  double norm() const noexcept;
  /// Probability D_v(i) = v(i)^2 / |v|^2.
  double probability(std::size_t i) const;

  /// Node k of the implicit tree (1 = root). For invariant checks.
  double node(std::size_t k) const { return nodes_.at(k); }
  std::span<const double> values() const noexcept { return values_; }

  void reaggregate() noexcept;
  std::uint64_t updates_since_aggregation() const noexcept { return updates_; }

  const std::shared_ptr<CostLedger>& ledger() const noexcept { return ledger_; }
  void set_ledger(std::shared_ptr<CostLedger> ledger) { ledger_ = std::move(ledger); }

 private:
  std::vector<double> values_;
  std::vector<double> nodes_;
  std::size_t cap_;
  unsigned depth_;
  std::uint64_t updates_ = 0;
  std::shared_ptr<CostLedger> ledger_;
};

/// Builds a WeightTree from a non-empty sequence (throws InvalidInput otherwise).
WeightTree build_vector(std::span<const double> values, std::shared_ptr<CostLedger> ledger = nullptr);

}  // namespace sketch_sfa
