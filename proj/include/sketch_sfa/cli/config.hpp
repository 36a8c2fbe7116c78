#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>

namespace sketch_sfa::cli {

/// Bad command line or configuration; maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Flat key-value configuration in the TOML subset that is also valid INI:
///
///   # whole-line comment
///   [step1]
///   sketch_rows = 2048
///   [spectra]
///   source = "exact"
///   [preprocess]
///   normalize = true
///
/// Keys are stored as "section.key". Every key must appear in the schema with
/// a matching type; unknown keys, duplicates, keys outside a section and
/// inline comments are UsageErrors.
class Config {
 public:
  using Value = std::variant<double, bool, std::string>;

  static Config parse(const std::string& text);
  static Config load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  double number(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;

  /// Verbatim source, kept so a run manifest can replay the exact config.
  const std::string& source() const noexcept { return source_; }
  const std::map<std::string, Value>& values() const noexcept { return values_; }

 private:
  std::map<std::string, Value> values_;
  std::string source_;
};

enum class ValueType { Number, Count, Bool, String };

/// Allowed keys and their types.
const std::map<std::string, ValueType>& config_schema();

}  // namespace sketch_sfa::cli
