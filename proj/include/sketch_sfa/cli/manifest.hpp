#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sketch_sfa::cli {

inline constexpr const char* kVersion = "0.1.0";

/// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);
/// Hash of a file's bytes; UsageError when it cannot be read.
std::string file_hash(const std::string& path);

struct FileRecord {
  std::string path;
  std::string hash;
  /// Primary artifacts are deterministic and must replay byte-identically.
  /// Secondary ones (timings) are recorded but not compared.
  bool primary = true;
};

/// Everything needed to rerun a command: its arguments, the verbatim config,
/// the seed and the hashes of what it read and wrote.
struct RunManifest {
  std::string command;            // e.g. "run qi"
  std::vector<std::string> args;  // arguments after the program name
  std::string config_hash;        // of config_text; empty without a config
  std::string config_text;
  std::uint64_t seed = 0;
  std::vector<FileRecord> inputs;
  std::vector<FileRecord> outputs;
  double wall_seconds = 0.0;
  nlohmann::json ledger = nlohmann::json::object();
  std::string version = kVersion;
};

void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

/// `<primary output>.manifest.json`.
std::string manifest_path_for(const std::string& output);

}  // namespace sketch_sfa::cli
