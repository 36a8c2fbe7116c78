#pragma once

#include <atomic>
#include <cstdint>

#include <nlohmann/json.hpp>

namespace sketch_sfa {

struct LedgerSnapshot {
  std::uint64_t node_touches = 0;
  std::uint64_t entry_reads = 0;
  std::uint64_t rng_draws = 0;

  friend LedgerSnapshot operator-(const LedgerSnapshot& a, const LedgerSnapshot& b) {
    return {a.node_touches - b.node_touches, a.entry_reads - b.entry_reads,
            a.rng_draws - b.rng_draws};
  }
  friend bool operator==(const LedgerSnapshot&, const LedgerSnapshot&) = default;
};

inline void to_json(nlohmann::json& j, const LedgerSnapshot& s) {
  j = {{"node_touches", s.node_touches}, {"entry_reads", s.entry_reads}, {"rng_draws", s.rng_draws}};
}
inline void from_json(const nlohmann::json& j, LedgerSnapshot& s) {
  s.node_touches = j.at("node_touches").get<std::uint64_t>();
  s.entry_reads = j.at("entry_reads").get<std::uint64_t>();
  s.rng_draws = j.at("rng_draws").get<std::uint64_t>();
}

/// Access counters for sublinearity audits. Counters only grow; `reset()` is
/// the only way back to zero. Safe for concurrent increments.
class CostLedger {
 public:
  void touch_nodes(std::uint64_t n) noexcept { node_touches_.fetch_add(n, std::memory_order_relaxed); }
  void read_entries(std::uint64_t n) noexcept { entry_reads_.fetch_add(n, std::memory_order_relaxed); }
  void draw(std::uint64_t n) noexcept { rng_draws_.fetch_add(n, std::memory_order_relaxed); }

  LedgerSnapshot snapshot() const noexcept {
    return {node_touches_.load(std::memory_order_relaxed), entry_reads_.load(std::memory_order_relaxed),
            rng_draws_.load(std::memory_order_relaxed)};
  }

  void reset() noexcept {
    node_touches_.store(0);
    entry_reads_.store(0);
    rng_draws_.store(0);
  }

 private:
  std::atomic<std::uint64_t> node_touches_{0};
  std::atomic<std::uint64_t> entry_reads_{0};
  std::atomic<std::uint64_t> rng_draws_{0};
};

}  // namespace sketch_sfa
