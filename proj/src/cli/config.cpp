#include "sketch_sfa/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace sketch_sfa::cli {

const std::map<std::string, ValueType>& config_schema() {
  static const std::map<std::string, ValueType> schema = {
      {"preprocess.normalize", ValueType::Bool},
      {"preprocess.expand", ValueType::String},  // "none" | "quadratic"
      {"preprocess.max_expanded_dim", ValueType::Count},
      {"preprocess.max_pairs_per_class", ValueType::Count},
      {"exact.rank_tolerance", ValueType::Number},
      {"exact.pseudo_inverse", ValueType::Bool},
      {"spectra.source", ValueType::String},  // "estimated" | "exact"
      {"spectra.rows", ValueType::Count},
      {"spectra.sigma", ValueType::Number},
      {"step1.sketch_rows", ValueType::Count},
      {"step1.oversampling", ValueType::Number},
      {"step1.eps", ValueType::Number},
      {"step1.eta", ValueType::Number},
      {"step1.delta", ValueType::Number},
      {"step1.sigma_threshold", ValueType::Number},
      {"step1.centering_rows", ValueType::Count},
      {"step1.centering_tolerance", ValueType::Number},
      {"step2.eps", ValueType::Number},
      {"step2.delta", ValueType::Number},
      {"step2.max_samples", ValueType::Count},
      {"step3.eps", ValueType::Number},
      {"step4.eps", ValueType::Number},
      {"step4.delta", ValueType::Number},
      {"step5.sketch_rows", ValueType::Count},
      {"step5.eps", ValueType::Number},
      {"step5.eta", ValueType::Number},
      {"step5.delta", ValueType::Number},
      {"step5.gamma_threshold", ValueType::Number},
      {"step5.norm_samples", ValueType::Count},
      {"sampling.cap_factor", ValueType::Number},
      {"query.mode", ValueType::String},  // "estimated" | "exact"
      {"query.eps", ValueType::Number},
      {"query.delta", ValueType::Number},
      {"bench.d", ValueType::Count},
      {"bench.classes", ValueType::Count},
      {"bench.separation", ValueType::Number},
      {"bench.j", ValueType::Count},
      {"bench.eps_target", ValueType::Number},
  };
  return schema;
}

namespace {

Config::Value parse_value(const std::string& raw, const std::string& key) {
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return raw.substr(1, raw.size() - 2);
  if (raw == "true") return true;
  if (raw == "false") return false;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != raw.size() || raw.empty() || !std::isfinite(v)) {
    throw UsageError("config: cannot parse value '" + raw + "' of '" + key + "'");
  }
  return v;
}

bool matches(const Config::Value& v, ValueType type) {
  switch (type) {
    case ValueType::Number:
      return std::holds_alternative<double>(v);
    case ValueType::Count:
      return std::holds_alternative<double>(v) && std::get<double>(v) >= 0.0 &&
             std::floor(std::get<double>(v)) == std::get<double>(v);
    case ValueType::Bool:
      return std::holds_alternative<bool>(v);
    case ValueType::String:
      return std::holds_alternative<std::string>(v);
  }
  return false;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  c.source_ = text;
  boost::property_tree::ptree tree;
  try {
    std::istringstream in(text);
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  const auto& schema = config_schema();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw UsageError("config: key '" + section + "' outside any section");
    for (const auto& [name, leaf] : body) {
      const std::string key = section + "." + name;
      const auto it = schema.find(key);
      if (it == schema.end()) throw UsageError("config: unknown key '" + key + "'");
      Value v = parse_value(leaf.data(), key);
      if (!matches(v, it->second)) throw UsageError("config: wrong type for '" + key + "'");
      c.values_[key] = std::move(v);
    }
  }
  return c;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str());
}

double Config::number(const std::string& key, double fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::get<double>(it->second);
}

std::size_t Config::count(const std::string& key, std::size_t fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : static_cast<std::size_t>(std::get<double>(it->second));
}

bool Config::flag(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::get<bool>(it->second);
}

std::string Config::text(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : std::get<std::string>(it->second);
}

}  // namespace sketch_sfa::cli
