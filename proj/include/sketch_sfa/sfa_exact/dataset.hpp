#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sketch_sfa::exact {

enum class DataMode { TimeSeries, Classification };

std::string to_string(DataMode mode);
DataMode parse_mode(const std::string& text);

/// Samples in rows. Classification data carries one label per row; the
/// classes are the distinct label values.
struct Dataset {
  Eigen::MatrixXd x;
  std::vector<long> labels;
  DataMode mode = DataMode::TimeSeries;
  std::vector<std::string> columns;
  std::vector<std::string> warnings;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }
  bool has_labels() const { return !labels.empty(); }
};

/// Differences of sample pairs. Row r equals x(pairs[r].first) - x(pairs[r].second).
/// Classification pairs lie in one class with first < second; time-series
/// pairs are (t + 1, t).
struct DiffMatrix {
  Eigen::MatrixXd xdot;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  DataMode mode = DataMode::TimeSeries;
  /// Number of candidate pairs before subsampling.
  double candidate_pairs = 0.0;

  std::size_t rows() const { return pairs.size(); }
};

/// Reads a numeric CSV. With `label_column` (a header name or a zero-based
/// index) that column becomes integer labels and the mode is classification.
Dataset load_dataset(const std::string& path, const std::optional<std::string>& label_column = std::nullopt);
void save_dataset(const std::string& path, const Dataset& ds);

/// Sorted distinct labels.
std::vector<long> class_ids(const Dataset& ds);

}  // namespace sketch_sfa::exact
