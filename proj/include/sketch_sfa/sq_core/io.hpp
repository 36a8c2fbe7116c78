#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace sketch_sfa {

/// Row-major numeric table. `header` is empty when the source had none.
struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;
};

/// Parses a numeric CSV. The first line is taken as a header iff one of its
/// fields does not parse as a number. Rows must all have the same width.
CsvTable read_csv(std::istream& in);
CsvTable read_csv_file(const std::string& path);

/// Writes values with shortest round-trip formatting, so reading the file
/// back reproduces every double bit-for-bit.
void write_csv(std::ostream& out, const Eigen::MatrixXd& values, const std::vector<std::string>& header = {});
void write_csv_file(const std::string& path, const Eigen::MatrixXd& values,
                    const std::vector<std::string>& header = {});

std::string format_double(double v);

/// JSON sidecar for ingested matrices: dimensions plus free-form provenance.
struct DataManifest {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool has_labels = false;
  nlohmann::json provenance = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const DataManifest& m);
void from_json(const nlohmann::json& j, DataManifest& m);

/// Dense matrices as arrays of rows; vectors as flat arrays.
nlohmann::json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Eigen::VectorXd& v);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace sketch_sfa
