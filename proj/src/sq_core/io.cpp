#include "sketch_sfa/sq_core/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "sketch_sfa/sq_core/errors.hpp"

namespace sketch_sfa {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? std::string{} : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fields = split_fields(line);
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k) numeric = numeric && parse_double(fields[k], row[k]);
    if (!numeric) {
      if (rows.empty() && table.header.empty()) {
        table.header = std::move(fields);
        width = table.header.size();
        continue;
      }
      throw InvalidInput("non-numeric field on CSV line " + std::to_string(line_no));
    }
    if (width == 0) width = row.size();
    if (row.size() != width) {
      throw InvalidInput("CSV line " + std::to_string(line_no) + " has " + std::to_string(row.size()) +
                         " fields, expected " + std::to_string(width));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("CSV contains no data rows");
  table.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < width; ++j) {
      table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  return read_csv(in);
}

std::string format_double(double v) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  if (ec != std::errc{}) throw InvalidInput("cannot format value");
  return {buffer, ptr};
}

void write_csv(std::ostream& out, const Eigen::MatrixXd& values, const std::vector<std::string>& header) {
  if (!header.empty()) {
    if (header.size() != static_cast<std::size_t>(values.cols())) throw InvalidInput("CSV header width mismatch");
    for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
    out << '\n';
  }
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) out << (j ? "," : "") << format_double(values(i, j));
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const Eigen::MatrixXd& values, const std::vector<std::string>& header) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  write_csv(out, values, header);
}

void to_json(nlohmann::json& j, const DataManifest& m) {
  j = {{"rows", m.rows}, {"cols", m.cols}, {"has_labels", m.has_labels}, {"provenance", m.provenance}};
}

void from_json(const nlohmann::json& j, DataManifest& m) {
  m.rows = j.at("rows").get<std::size_t>();
  m.cols = j.at("cols").get<std::size_t>();
  m.has_labels = j.value("has_labels", false);
  m.provenance = j.value("provenance", nlohmann::json::object());
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("matrix JSON must be an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput("ragged matrix JSON");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  return nlohmann::json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("vector JSON must be an array");
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

}  // namespace sketch_sfa
