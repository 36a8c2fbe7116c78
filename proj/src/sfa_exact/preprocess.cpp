#include "sketch_sfa/sfa_exact/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa::exact {

Dataset normalize(const Dataset& ds) {
  const Eigen::Index n = ds.x.rows();
  if (n < 2) throw InvalidInput("normalize needs at least 2 rows, got " + std::to_string(n));
  Dataset out;
  out.labels = ds.labels;
  out.mode = ds.mode;
  out.warnings = ds.warnings;
  std::vector<Eigen::Index> kept;
  std::vector<double> means;
  std::vector<double> scales;
  for (Eigen::Index j = 0; j < ds.x.cols(); ++j) {
    const double mean = ds.x.col(j).mean();
    const double var = (ds.x.col(j).array() - mean).square().mean();
    const double sd = std::sqrt(var);
    const std::string name = j < static_cast<Eigen::Index>(ds.columns.size()) ? ds.columns[static_cast<std::size_t>(j)]
                                                                               : "column " + std::to_string(j);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      out.warnings.push_back("dropped constant " + name);
      continue;
    }
    kept.push_back(j);
    means.push_back(mean);
    scales.push_back(sd);
    if (!ds.columns.empty()) out.columns.push_back(name);
  }
  if (kept.empty()) throw InvalidInput("normalize: every column is constant");
  out.x.resize(n, static_cast<Eigen::Index>(kept.size()));
  for (std::size_t k = 0; k < kept.size(); ++k) {
    out.x.col(static_cast<Eigen::Index>(k)) = (ds.x.col(kept[k]).array() - means[k]) / scales[k];
  }
  return out;
}

Dataset quadratic_expand(const Dataset& ds, std::size_t max_dim) {
  const std::size_t d = ds.cols();
  if (d == 0) throw InvalidInput("quadratic_expand needs at least one column");
  const std::size_t width = d + d * (d + 1) / 2;
  if (width > max_dim) {
    throw BudgetExceeded("quadratic expansion to " + std::to_string(width) + " columns exceeds the cap " +
                         std::to_string(max_dim));
  }
  Dataset out;
  out.labels = ds.labels;
  out.mode = ds.mode;
  out.warnings = ds.warnings;
  out.x.resize(ds.x.rows(), static_cast<Eigen::Index>(width));
  out.x.leftCols(static_cast<Eigen::Index>(d)) = ds.x;
  Eigen::Index c = static_cast<Eigen::Index>(d);
  for (Eigen::Index a = 0; a < static_cast<Eigen::Index>(d); ++a) {
    for (Eigen::Index b = a; b < static_cast<Eigen::Index>(d); ++b) out.x.col(c++) = ds.x.col(a).cwiseProduct(ds.x.col(b));
  }
  if (!ds.columns.empty()) {
    out.columns = ds.columns;
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) out.columns.push_back(ds.columns[a] + "*" + ds.columns[b]);
    }
  }
  return out;
}

namespace {

// Pair (a, b), a < b, of rank r in the lexicographic order over m items.
std::pair<std::size_t, std::size_t> unrank_pair(std::uint64_t r, std::uint64_t m) {
  const auto offset = [m](std::uint64_t a) { return a * (2 * m - a - 1) / 2; };
  std::uint64_t lo = 0;
  std::uint64_t hi = m - 2;
  while (lo < hi) {
    const std::uint64_t mid = (lo + hi + 1) / 2;
    if (offset(mid) <= r) lo = mid;
    else hi = mid - 1;
  }
  return {static_cast<std::size_t>(lo), static_cast<std::size_t>(lo + 1 + (r - offset(lo)))};
}

// k distinct ranks in [0, total), ascending (Floyd's algorithm).
std::vector<std::uint64_t> distinct_ranks(std::uint64_t total, std::uint64_t k, Rng& rng) {
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(static_cast<std::size_t>(k) * 2);
  for (std::uint64_t j = total - k; j < total; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> out(chosen.begin(), chosen.end());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Eigen::MatrixXd difference_rows(const Eigen::MatrixXd& x, const DiffMatrix& pairs) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(pairs.rows()), x.cols());
  for (std::size_t r = 0; r < pairs.rows(); ++r) {
    const auto [s, t] = pairs.pairs[r];
    if (s >= static_cast<std::size_t>(x.rows()) || t >= static_cast<std::size_t>(x.rows())) {
      throw IndexError("pair index out of range");
    }
    out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(s)) - x.row(static_cast<Eigen::Index>(t));
  }
  return out;
}

DiffMatrix pairwise_differentiate(const Dataset& ds, std::size_t max_pairs_per_class, Rng& rng) {
  DiffMatrix out;
  out.mode = ds.mode;
  if (ds.mode == DataMode::TimeSeries) {
    if (ds.rows() < 2) throw InvalidInput("temporal differences need at least 2 rows");
    for (std::size_t t = 0; t + 1 < ds.rows(); ++t) out.pairs.emplace_back(t + 1, t);
    out.candidate_pairs = static_cast<double>(out.pairs.size());
    out.xdot = difference_rows(ds.x, out);
    return out;
  }
  if (ds.labels.size() != ds.rows()) throw InvalidInput("classification data needs one label per row");
  if (max_pairs_per_class == 0) throw InvalidInput("max_pairs_per_class must be positive");
  std::map<long, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < ds.labels.size(); ++i) members[ds.labels[i]].push_back(i);
  for (const auto& [label, rows] : members) {
    if (rows.size() < 2) throw InvalidInput("class " + std::to_string(label) + " has a single member");
    const std::uint64_t m = rows.size();
    const std::uint64_t total = m * (m - 1) / 2;
    out.candidate_pairs += static_cast<double>(total);
    if (total <= max_pairs_per_class) {
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) out.pairs.emplace_back(rows[a], rows[b]);
      }
      continue;
    }
    for (const auto r : distinct_ranks(total, max_pairs_per_class, rng)) {
      const auto [a, b] = unrank_pair(r, m);
      out.pairs.emplace_back(rows[a], rows[b]);
    }
  }
  out.xdot = difference_rows(ds.x, out);
  return out;
}

}  // namespace sketch_sfa::exact
