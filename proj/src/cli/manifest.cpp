#include "sketch_sfa/cli/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sketch_sfa/cli/config.hpp"

namespace sketch_sfa::cli {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream bytes;
  bytes << in.rdbuf();
  return fnv1a_hex(bytes.str());
}

namespace {

nlohmann::json files_to_json(const std::vector<FileRecord>& files) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& f : files) out.push_back({{"path", f.path}, {"hash", f.hash}, {"primary", f.primary}});
  return out;
}

std::vector<FileRecord> files_from_json(const nlohmann::json& j) {
  std::vector<FileRecord> out;
  for (const auto& f : j) {
    out.push_back({f.at("path").get<std::string>(), f.at("hash").get<std::string>(), f.value("primary", true)});
  }
  return out;
}

}  // namespace

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = {{"command", m.command},
       {"args", m.args},
       {"config_hash", m.config_hash},
       {"config_text", m.config_text},
       {"seed", m.seed},
       {"inputs", files_to_json(m.inputs)},
       {"outputs", files_to_json(m.outputs)},
       {"wall_seconds", m.wall_seconds},
       {"ledger", m.ledger},
       {"version", m.version}};
}

void from_json(const nlohmann::json& j, RunManifest& m) {
  m.command = j.at("command").get<std::string>();
  m.args = j.at("args").get<std::vector<std::string>>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.config_text = j.at("config_text").get<std::string>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.inputs = files_from_json(j.at("inputs"));
  m.outputs = files_from_json(j.at("outputs"));
  m.wall_seconds = j.at("wall_seconds").get<double>();
  m.ledger = j.at("ledger");
  m.version = j.at("version").get<std::string>();
}

std::string manifest_path_for(const std::string& output) { return output + ".manifest.json"; }

}  // namespace sketch_sfa::cli
