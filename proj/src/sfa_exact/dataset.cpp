#include "sketch_sfa/sfa_exact/dataset.hpp"

#include <algorithm>
#include <cmath>

#include "sketch_sfa/sq_core/errors.hpp"
#include "sketch_sfa/sq_core/io.hpp"

namespace sketch_sfa::exact {

std::string to_string(DataMode mode) {
  return mode == DataMode::TimeSeries ? "time-series" : "classification";
}

DataMode parse_mode(const std::string& text) {
  if (text == "time-series") return DataMode::TimeSeries;
  if (text == "classification") return DataMode::Classification;
  throw InvalidInput("unknown data mode '" + text + "'");
}

namespace {

std::size_t resolve_column(const CsvTable& table, const std::string& spec) {
  const auto it = std::find(table.header.begin(), table.header.end(), spec);
  if (it != table.header.end()) return static_cast<std::size_t>(it - table.header.begin());
  std::size_t index = 0;
  try {
    std::size_t used = 0;
    index = std::stoul(spec, &used);
    if (used != spec.size()) throw InvalidInput("");
  } catch (const std::exception&) {
    throw InvalidInput("label column '" + spec + "' not found");
  }
  if (index >= static_cast<std::size_t>(table.values.cols())) throw InvalidInput("label column index out of range");
  return index;
}

}  // namespace

Dataset load_dataset(const std::string& path, const std::optional<std::string>& label_column) {
  CsvTable table = read_csv_file(path);
  Dataset ds;
  const auto cols = static_cast<std::size_t>(table.values.cols());
  if (!label_column) {
    ds.x = std::move(table.values);
    ds.columns = std::move(table.header);
    return ds;
  }
  const std::size_t label = resolve_column(table, *label_column);
  if (cols < 2) throw InvalidInput("dataset has no feature columns besides the labels");
  ds.mode = DataMode::Classification;
  ds.x.resize(table.values.rows(), static_cast<Eigen::Index>(cols - 1));
  ds.labels.resize(static_cast<std::size_t>(table.values.rows()));
  for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
    const double v = table.values(i, static_cast<Eigen::Index>(label));
    if (v != std::round(v)) throw InvalidInput("non-integer label on data row " + std::to_string(i + 1));
    ds.labels[static_cast<std::size_t>(i)] = static_cast<long>(v);
    Eigen::Index out = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      if (j != label) ds.x(i, out++) = table.values(i, static_cast<Eigen::Index>(j));
    }
  }
  for (std::size_t j = 0; j < table.header.size(); ++j) {
    if (j != label) ds.columns.push_back(table.header[j]);
  }
  return ds;
}

void save_dataset(const std::string& path, const Dataset& ds) {
  if (!ds.has_labels()) {
    write_csv_file(path, ds.x, ds.columns);
    return;
  }
  Eigen::MatrixXd out(ds.x.rows(), ds.x.cols() + 1);
  out.leftCols(ds.x.cols()) = ds.x;
  for (std::size_t i = 0; i < ds.labels.size(); ++i) out(static_cast<Eigen::Index>(i), ds.x.cols()) = static_cast<double>(ds.labels[i]);
  std::vector<std::string> header;
  if (!ds.columns.empty()) {
    header = ds.columns;
    header.emplace_back("label");
  }
  write_csv_file(path, out, header);
}

std::vector<long> class_ids(const Dataset& ds) {
  std::vector<long> ids = ds.labels;
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace sketch_sfa::exact
